#pragma once

#include "ldap/error.hpp"
#include "ldap/rng.hpp"
#include "ldap/parallel.hpp"
#include "ldap/geometry.hpp"
#include "ldap/samplers.hpp"
#include "ldap/regions.hpp"
#include "ldap/mlp.hpp"
#include "ldap/conditions.hpp"
#include "ldap/viability.hpp"
#include "ldap/attacks.hpp"
#include "ldap/bounds.hpp"
#include "ldap/report.hpp"
#include "ldap/config.hpp"
#include "ldap/experiments.hpp"
