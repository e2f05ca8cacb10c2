#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ldap/error.hpp"

namespace ldap {

enum class BoundRole { Lower, Upper, Tight };

inline std::string role_name(BoundRole r) {
  switch (r) {
    case BoundRole::Lower: return "lower";
    case BoundRole::Upper: return "upper";
    case BoundRole::Tight: return "tight";
  }
  return "lower";
}

inline BoundRole parse_role(const std::string& s) {
  if (s == "lower") return BoundRole::Lower;
  if (s == "upper") return BoundRole::Upper;
  if (s == "tight") return BoundRole::Tight;
  throw Error(Errc::ConfigError, "unknown bound role '" + s + "' (expected lower, upper or tight)");
}

struct BoundColumn {
  std::string name;
  BoundRole role = BoundRole::Lower;
};

/// One epsilon of a fooling curve. Bound values align with FoolingCurve::bounds; NaN means not applicable.
struct CurveRow {
  double eps = 0.0;
  double fr_hat = 0.0;
  double std_err = 0.0;
  std::vector<double> bounds;
  std::vector<double> bound_se;  // sampling error of each bound; not written to CSV
  double alpha = std::nan("");
  double delta = std::nan("");
  double beta = std::nan("");
  double gamma = std::nan("");
  double theta = std::nan("");
  double L = std::nan("");
  double R = std::nan("");
  double t = std::nan("");
  std::string flag;
};

struct FoolingCurve {
  std::string experiment_id;
  std::string region;
  long long k = 0;
  std::uint64_t seed = 0;
  std::vector<BoundColumn> bounds;
  std::vector<CurveRow> rows;
};

/// Slack used when comparing a bound to the empirical rate.
inline constexpr double kSigmaSlack = 3.0;

/**
 * Sets each row's flag to the bounds it violates beyond kSigmaSlack combined
 * standard errors: a lower bound above fr_hat, an upper bound below it, or a
 * tight value away from it. Returns the number of flagged rows.
 */
inline std::size_t flag_violations(FoolingCurve& curve) {
  std::size_t flagged = 0;
  for (auto& row : curve.rows) {
    std::string flag;
    for (std::size_t b = 0; b < curve.bounds.size() && b < row.bounds.size(); ++b) {
      const double v = row.bounds[b];
      if (std::isnan(v)) continue;
      const double se_b = b < row.bound_se.size() ? row.bound_se[b] : 0.0;
      const double slack = kSigmaSlack * std::sqrt(row.std_err * row.std_err + se_b * se_b) + 1e-12;
      bool bad = false;
      switch (curve.bounds[b].role) {
        case BoundRole::Lower: bad = v > row.fr_hat + slack; break;
        case BoundRole::Upper: bad = v < row.fr_hat - slack; break;
        case BoundRole::Tight: bad = std::abs(v - row.fr_hat) > slack; break;
      }
      if (bad) {
        if (!flag.empty()) flag += ';';
        flag += "violates_" + curve.bounds[b].name;
      }
    }
    if (!flag.empty()) ++flagged;
    // keep markers written by the runner (e.g. errors) in front
    if (row.flag.rfind("error", 0) == 0) {
      row.flag = flag.empty() ? row.flag : row.flag + ";" + flag;
    } else {
      row.flag = flag;
    }
  }
  return flagged;
}

// ---------------------------------------------------------------------------
// Margin ECDF

/// Right-continuous empirical CDF of a sample.
class MarginEcdf {
 public:
  explicit MarginEcdf(std::vector<double> values) : sorted_(std::move(values)) {
    require(!sorted_.empty(), Errc::EmptySample, "ECDF of an empty sample");
    std::sort(sorted_.begin(), sorted_.end());
  }
  double operator()(double t) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
  }
  std::size_t size() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }

 private:
  std::vector<double> sorted_;
};

inline MarginEcdf margin_ecdf(std::vector<double> values) { return MarginEcdf(std::move(values)); }

// ---------------------------------------------------------------------------
// CSV

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(Errc::IoError, "malformed number '" + s + "' in CSV");
  }
  return v;
}

namespace detail {
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

/// Union of bound columns across curves, in first-seen order.
inline std::vector<BoundColumn> bound_union(const std::vector<FoolingCurve>& curves) {
  std::vector<BoundColumn> cols;
  for (const auto& c : curves) {
    for (const auto& b : c.bounds) {
      const bool seen = std::any_of(cols.begin(), cols.end(), [&](const BoundColumn& x) { return x.name == b.name; });
      if (!seen) cols.push_back(b);
    }
  }
  return cols;
}
}  // namespace detail

inline constexpr std::array<const char*, 7> kCsvLeading = {"experiment_id", "region", "k", "seed",
                                                          "eps", "fr_hat", "stderr"};
inline constexpr std::array<const char*, 9> kCsvTrailing = {"alpha", "delta", "beta", "gamma", "theta",
                                                           "L", "flag", "R", "t"};

/**
 * Writes the curves as CSV. `metadata` lines are emitted first as
 * "# key: value" comments, followed by one "# bound <name>: <role>" line per
 * bound column. Bound columns are the union over curves; missing ones are nan.
 */
inline std::string curves_to_csv(const std::vector<FoolingCurve>& curves,
                                 const std::vector<std::pair<std::string, std::string>>& metadata = {}) {
  std::ostringstream out;
  for (const auto& [k, v] : metadata) out << "# " << k << ": " << v << '\n';
  const auto cols = detail::bound_union(curves);
  for (const auto& c : cols) out << "# bound " << c.name << ": " << role_name(c.role) << '\n';

  bool first = true;
  auto emit = [&](const std::string& s) {
    if (!first) out << ',';
    out << s;
    first = false;
  };
  for (const char* h : kCsvLeading) emit(h);
  for (const auto& c : cols) emit("bound_" + c.name);
  for (const char* h : kCsvTrailing) emit(h);
  out << '\n';

  for (const auto& curve : curves) {
    for (const auto& row : curve.rows) {
      first = true;
      emit(detail::csv_field(curve.experiment_id));
      emit(detail::csv_field(curve.region));
      emit(std::to_string(curve.k));
      emit(std::to_string(curve.seed));
      emit(format_double(row.eps));
      emit(format_double(row.fr_hat));
      emit(format_double(row.std_err));
      for (const auto& c : cols) {
        double v = std::nan("");
        for (std::size_t b = 0; b < curve.bounds.size(); ++b) {
          if (curve.bounds[b].name == c.name && b < row.bounds.size()) v = row.bounds[b];
        }
        emit(format_double(v));
      }
      for (double v : {row.alpha, row.delta, row.beta, row.gamma, row.theta, row.L}) emit(format_double(v));
      emit(detail::csv_field(row.flag));
      emit(format_double(row.R));
      emit(format_double(row.t));
      out << '\n';
    }
  }
  return out.str();
}

/// Parses CSV written by curves_to_csv. Rows are grouped into curves by (experiment_id, region, k, seed).
inline std::vector<FoolingCurve> curves_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::map<std::string, BoundRole> roles;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.rfind("# bound ", 0) == 0) {
      const auto colon = line.rfind(": ");
      if (colon != std::string::npos) roles[line.substr(8, colon - 8)] = parse_role(line.substr(colon + 2));
      continue;
    }
    if (line.rfind('#', 0) == 0) continue;
    header = detail::split_csv_line(line);
    break;
  }
  require(header.size() >= kCsvLeading.size() + kCsvTrailing.size(), Errc::IoError, "CSV header is missing columns");
  for (std::size_t i = 0; i < kCsvLeading.size(); ++i) {
    require(header[i] == kCsvLeading[i], Errc::IoError, "unexpected CSV column '" + header[i] + "'");
  }
  const std::size_t n_bounds = header.size() - kCsvLeading.size() - kCsvTrailing.size();
  std::vector<BoundColumn> cols;
  for (std::size_t b = 0; b < n_bounds; ++b) {
    const std::string& h = header[kCsvLeading.size() + b];
    require(h.rfind("bound_", 0) == 0, Errc::IoError, "unexpected CSV column '" + h + "'");
    const std::string name = h.substr(6);
    cols.push_back({name, roles.count(name) ? roles[name] : BoundRole::Lower});
  }

  std::vector<FoolingCurve> curves;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    require(f.size() == header.size(), Errc::IoError, "CSV row has " + std::to_string(f.size()) + " fields, expected " +
                                                          std::to_string(header.size()));
    const long long k = std::stoll(f[2]);
    const std::uint64_t seed = std::stoull(f[3]);
    if (curves.empty() || curves.back().experiment_id != f[0] || curves.back().region != f[1] ||
        curves.back().k != k || curves.back().seed != seed) {
      FoolingCurve c;
      c.experiment_id = f[0];
      c.region = f[1];
      c.k = k;
      c.seed = seed;
      c.bounds = cols;
      curves.push_back(std::move(c));
    }
    CurveRow row;
    row.eps = parse_double(f[4]);
    row.fr_hat = parse_double(f[5]);
    row.std_err = parse_double(f[6]);
    for (std::size_t b = 0; b < n_bounds; ++b) row.bounds.push_back(parse_double(f[7 + b]));
    const std::size_t t0 = 7 + n_bounds;
    row.alpha = parse_double(f[t0]);
    row.delta = parse_double(f[t0 + 1]);
    row.beta = parse_double(f[t0 + 2]);
    row.gamma = parse_double(f[t0 + 3]);
    row.theta = parse_double(f[t0 + 4]);
    row.L = parse_double(f[t0 + 5]);
    row.flag = f[t0 + 6];
    row.R = parse_double(f[t0 + 7]);
    row.t = parse_double(f[t0 + 8]);
    curves.back().rows.push_back(std::move(row));
  }
  return curves;
}

// ---------------------------------------------------------------------------
// SVG

/**
 * Line plot of fr_hat against eps: solid lines with error bars for the
 * empirical curves, dashed lines for the bounds. 960 x 540 viewBox, generic
 * font family only.
 */
inline std::string curves_to_svg(const std::vector<FoolingCurve>& curves, const std::string& title) {
  constexpr double W = 960, H = 540, left = 70, right = 220, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;
  double eps_max = 0.0;
  for (const auto& c : curves)
    for (const auto& r : c.rows) eps_max = std::max(eps_max, r.eps);
  if (eps_max <= 0.0) eps_max = 1.0;
  auto px = [&](double e) { return left + pw * e / eps_max; };
  auto py = [&](double p) { return top + ph * (1.0 - std::clamp(p, 0.0, 1.0)); };
  auto fmt = [](double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
  };
  static constexpr std::array<const char*, 8> palette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                         "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};
  auto escape = [](const std::string& s) {
    std::string o;
    for (char c : s) {
      if (c == '<') o += "&lt;";
      else if (c == '>') o += "&gt;";
      else if (c == '&') o += "&amp;";
      else o += c;
    }
    return o;
  };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 960 540\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"960\" height=\"540\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title) << "</text>\n";
  o << "<g stroke=\"#444\" fill=\"none\">\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph << "\"/>\n";
  o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph << "\"/>\n";
  o << "</g>\n";
  for (int i = 0; i <= 5; ++i) {
    const double e = eps_max * i / 5.0, p = i / 5.0;
    o << "<text x=\"" << fmt(px(e)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << fmt(e) << "</text>\n";
    o << "<text x=\"" << left - 8 << "\" y=\"" << fmt(py(p) + 4) << "\" text-anchor=\"end\">" << fmt(p) << "</text>\n";
  }
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">eps</text>\n";
  o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 18 " << top + ph / 2
    << ")\" text-anchor=\"middle\">fooling rate</text>\n";

  double legend_y = top + 10;
  auto legend = [&](const std::string& color, bool dashed, const std::string& label) {
    const double x0 = left + pw + 15;
    o << "<line x1=\"" << x0 << "\" y1=\"" << legend_y << "\" x2=\"" << x0 + 24 << "\" y2=\"" << legend_y
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"" << (dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
    o << "<text x=\"" << x0 + 30 << "\" y=\"" << legend_y + 4 << "\">" << escape(label) << "</text>\n";
    legend_y += 18;
  };

  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const auto& c = curves[ci];
    const std::string color = palette[ci % palette.size()];
    std::string pts;
    for (const auto& r : c.rows) pts += fmt(px(r.eps)) + "," + fmt(py(r.fr_hat)) + " ";
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    for (const auto& r : c.rows) {
      o << "<line x1=\"" << fmt(px(r.eps)) << "\" y1=\"" << fmt(py(r.fr_hat - r.std_err)) << "\" x2=\""
        << fmt(px(r.eps)) << "\" y2=\"" << fmt(py(r.fr_hat + r.std_err)) << "\" stroke=\"" << color << "\"/>\n";
    }
    legend(color, false, c.region + " k=" + std::to_string(c.k) + " seed=" + std::to_string(c.seed));
    for (std::size_t b = 0; b < c.bounds.size(); ++b) {
      std::string seg;
      auto flush = [&] {
        if (seg.find(' ') != seg.rfind(' ')) {
          o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\" points=\""
            << seg << "\"/>\n";
        }
        seg.clear();
      };
      for (const auto& r : c.rows) {
        if (b >= r.bounds.size() || std::isnan(r.bounds[b])) {
          flush();
          continue;
        }
        seg += fmt(px(r.eps)) + "," + fmt(py(r.bounds[b])) + " ";
      }
      flush();
      if (ci == 0) legend(color, true, c.bounds[b].name + " (" + role_name(c.bounds[b].role) + ")");
    }
  }
  o << "</svg>\n";
  return o.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(Errc::IoError, "write failed for '" + path.string() + "'");
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Writes the CSV and, when svg_path is non-empty, the SVG plot.
inline void render_report(const std::vector<FoolingCurve>& curves, const std::filesystem::path& csv_path,
                          const std::filesystem::path& svg_path,
                          const std::vector<std::pair<std::string, std::string>>& metadata = {},
                          const std::string& title = "") {
  require(!curves.empty(), Errc::EmptySample, "report needs at least one curve");
  write_text_file(csv_path, curves_to_csv(curves, metadata));
  if (!svg_path.empty()) write_text_file(svg_path, curves_to_svg(curves, title.empty() ? curves.front().experiment_id : title));
}

}  // namespace ldap
