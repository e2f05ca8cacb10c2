#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "ldap/regions.hpp"

namespace ldap {

enum class Activation { Relu, Tanh };

inline std::string activation_name(Activation a) { return a == Activation::Relu ? "relu" : "tanh"; }

inline Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::Relu;
  if (s == "tanh") return Activation::Tanh;
  throw Error(Errc::BadShape, "unknown activation '" + s + "'");
}

/**
 * Bias-free feed-forward net f(x) = a^T z_{M-1}, z_l = act(W_l z_{l-1}),
 * z_0 = x. Layer l holds a d_l x d_{l-1} matrix; the last layer is the
 * 1 x d_{M-1} output row a. At least one hidden layer is required.
 */
class MlpNet final : public Region {
 public:
  MlpNet(std::vector<Matrix> layers, Activation activation)
      : layers_(std::move(layers)), activation_(activation) {
    require(layers_.size() >= 2, Errc::BadShape, "MLP needs at least one hidden layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      require(layers_[l].rows() >= 1 && layers_[l].cols() >= 1, Errc::BadShape, "empty layer");
      require(layers_[l].allFinite(), Errc::BadShape, "layer " + std::to_string(l) + " has non-finite weights");
      if (l > 0) {
        require(layers_[l].cols() == layers_[l - 1].rows(), Errc::BadShape,
                "layer " + std::to_string(l) + " input width does not match previous output");
      }
    }
    require(layers_.back().rows() == 1, Errc::BadShape, "output layer must have width 1");
  }

  Eigen::Index dim() const override { return layers_.front().cols(); }
  std::string kind() const override { return "mlp"; }
  Activation activation() const { return activation_; }
  const std::vector<Matrix>& layers() const { return layers_; }
  std::size_t depth() const { return layers_.size(); }

  std::vector<Eigen::Index> widths() const {
    std::vector<Eigen::Index> w{dim()};
    for (const auto& m : layers_) w.push_back(m.rows());
    return w;
  }

  /// Last hidden-layer features z_{M-1}(x).
  Vector features(const Vector& x) const {
    check_dim(x.size(), dim(), "mlp features");
    Vector z = x;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) z = activate(layers_[l] * z);
    return z;
  }

  /// Smallest |pre-activation| over all hidden units at x.
  double min_abs_preactivation(const Vector& x) const {
    check_dim(x.size(), dim(), "mlp");
    double best = std::numeric_limits<double>::infinity();
    Vector z = x;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
      Vector h = layers_[l] * z;
      best = std::min(best, h.cwiseAbs().minCoeff());
      z = activate(h);
    }
    return best;
  }

  /**
   * For tanh: upper bound on the gradient Lipschitz constant from the layer
   * chain. With J_l the Jacobian of z_l,
   *   Lip(J_l) <= c ||W_l||^2 prod_{i<l} ||W_i||^2 + ||W_l|| Lip(J_{l-1}),
   * c = max|tanh''| = 4/(3 sqrt 3), and L <= ||a|| Lip(J_{M-1}).
   * ReLU gradients are discontinuous, so no bound is returned.
   */
  std::optional<double> lipschitz_bound() const override {
    if (activation_ == Activation::Relu) return std::nullopt;
    const double c = 4.0 / (3.0 * std::sqrt(3.0));
    double lip = 0.0;
    double jac = 1.0;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
      const double w = operator_norm(layers_[l]);
      lip = c * w * w * jac * jac + w * lip;
      jac *= w;
    }
    return layers_.back().norm() * lip;
  }

 protected:
  double value_impl(const Vector& x) const override {
    Vector z = x;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) z = activate(layers_[l] * z);
    return (layers_.back() * z)(0);
  }

  Vector gradient_impl(const Vector& x) const override {
    std::vector<Vector> pre;
    pre.reserve(layers_.size() - 1);
    Vector z = x;
    for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
      pre.push_back(layers_[l] * z);
      z = activate(pre.back());
    }
    Vector delta = layers_.back().row(0).transpose();
    for (std::size_t l = layers_.size() - 1; l-- > 0;) {
      delta = delta.cwiseProduct(derivative(pre[l]));
      delta = layers_[l].transpose() * delta;
    }
    return delta;
  }

 private:
  Vector activate(const Vector& h) const {
    if (activation_ == Activation::Relu) return h.cwiseMax(0.0);
    return h.array().tanh().matrix();
  }
  Vector derivative(const Vector& h) const {
    if (activation_ == Activation::Relu) return (h.array() > 0.0).cast<double>().matrix();  // relu'(0) = 0
    return (1.0 - h.array().tanh().square()).matrix();
  }
  static double operator_norm(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }

  std::vector<Matrix> layers_;
  Activation activation_;
};

/// Training pairs for the ridge-fitted output layer.
struct RidgeData {
  std::vector<Vector> inputs;
  std::vector<double> targets;
  double lambda = 1e-2;
};

/**
 * Random net with entries of W_l i.i.d. N(0, 1/d_{l-1}), drawn layer by
 * layer in row-major order. Without ridge data the output row is random
 * too; with it, the output row is the ridge solution on the last hidden
 * features (random-features regime).
 */
inline MlpNet init_random_mlp(const std::vector<Eigen::Index>& widths, Activation activation, Rng& rng,
                              const std::optional<RidgeData>& ridge = std::nullopt) {
  require(widths.size() >= 3, Errc::BadShape, "widths must include input, at least one hidden layer and output");
  require(widths.back() == 1, Errc::BadShape, "output width must be 1");
  for (auto w : widths) require(w >= 1, Errc::BadShape, "layer widths must be positive");

  std::vector<Matrix> layers;
  for (std::size_t l = 1; l < widths.size(); ++l) {
    const double sd = 1.0 / std::sqrt(static_cast<double>(widths[l - 1]));
    Matrix w(widths[l], widths[l - 1]);
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = sd * rng.normal();
    layers.push_back(std::move(w));
  }
  MlpNet net(layers, activation);
  if (!ridge) return net;

  require(!ridge->inputs.empty() && ridge->inputs.size() == ridge->targets.size(), Errc::BadShape,
          "ridge data needs matching non-empty inputs and targets");
  require(ridge->lambda >= 0.0, Errc::BadShape, "ridge lambda must be nonnegative");
  const Eigen::Index h = widths[widths.size() - 2];
  const auto n = static_cast<Eigen::Index>(ridge->inputs.size());
  Matrix z(n, h);
  Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    z.row(i) = net.features(ridge->inputs[static_cast<std::size_t>(i)]).transpose();
    y[i] = ridge->targets[static_cast<std::size_t>(i)];
  }
  Matrix gram = z.transpose() * z;
  gram.diagonal().array() += ridge->lambda;
  Vector a = gram.ldlt().solve(z.transpose() * y);
  layers.back() = a.transpose();
  return MlpNet(std::move(layers), activation);
}

/// {"activation": "relu"|"tanh", "widths": [...], "weights": [[row-major d_l x d_{l-1}], ...]}
inline nlohmann::json mlp_to_json(const MlpNet& net) {
  nlohmann::json j;
  j["activation"] = activation_name(net.activation());
  j["widths"] = net.widths();
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& m : net.layers()) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index k = 0; k < m.cols(); ++k) flat.push_back(m(i, k));
    weights.push_back(flat);
  }
  j["weights"] = weights;
  return j;
}

inline MlpNet mlp_from_json(const nlohmann::json& j) {
  try {
    require(j.is_object(), Errc::BadShape, "weight document must be an object");
    const auto act = parse_activation(j.at("activation").get<std::string>());
    const auto widths = j.at("widths").get<std::vector<long long>>();
    const auto& weights = j.at("weights");
    require(widths.size() >= 3, Errc::BadShape, "widths must list at least 3 layers");
    require(weights.is_array() && weights.size() == widths.size() - 1, Errc::BadShape,
            "expected one weight array per layer transition");
    std::vector<Matrix> layers;
    for (std::size_t l = 1; l < widths.size(); ++l) {
      require(widths[l] >= 1 && widths[l - 1] >= 1, Errc::BadShape, "layer widths must be positive");
      const auto flat = weights[l - 1].get<std::vector<double>>();
      require(flat.size() == static_cast<std::size_t>(widths[l] * widths[l - 1]), Errc::BadShape,
              "layer " + std::to_string(l) + " has " + std::to_string(flat.size()) + " weights, expected " +
                  std::to_string(widths[l] * widths[l - 1]));
      Matrix m(widths[l], widths[l - 1]);
      std::size_t idx = 0;
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
          m(i, k) = flat[idx++];
          require(std::isfinite(m(i, k)), Errc::BadShape, "non-finite weight");
        }
      layers.push_back(std::move(m));
    }
    return MlpNet(std::move(layers), act);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadShape, std::string("malformed weight document: ") + e.what());
  }
}

inline MlpNet load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open weight file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadShape, "weight file '" + path + "' is not valid JSON: " + e.what());
  }
  return mlp_from_json(j);
}

inline void save_mlp(const MlpNet& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write weight file '" + path + "'");
  out << mlp_to_json(net).dump() << '\n';
}

}  // namespace ldap
