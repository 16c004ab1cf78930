// Closed forms of the linear-demand / quadratic-cost monopolist with a
// lump-sum menu cost: optimal price and output, profit gains from adjusting,
// the quadratic loss coefficient, the optimal (S,s) half-width and its
// comparative statics with respect to the demand slope.
#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace menucost {

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Demand Y = alpha - beta*P + u, cost C(Y) = a + b*Y + c*Y^2, menu cost gamma,
/// random-walk step scale sigma. The disturbance bounds default to
/// +/-(alpha - beta*b)/2 when not set.
template <typename Scalar = double>
struct ModelParams {
  Scalar alpha{10};
  Scalar beta{1};
  Scalar a{1};
  Scalar b{1};
  Scalar c{0.5};
  Scalar gamma{1};
  Scalar sigma{1};
  std::optional<Scalar> u_min;
  std::optional<Scalar> u_max;

  Scalar u_lower() const { return u_min ? *u_min : -(alpha - beta * b) / Scalar(2); }
  Scalar u_upper() const { return u_max ? *u_max : (alpha - beta * b) / Scalar(2); }

  ModelParams with_beta(Scalar new_beta) const {
    ModelParams p = *this;
    p.beta = new_beta;
    return p;
  }
};

template <typename Scalar>
struct ComparativeStatics {
  Scalar dtheta_dbeta;
  Scalar dh_dtheta;
  Scalar dY_dbeta;
  Scalar dh_dbeta;
};

namespace detail {
template <typename Scalar>
[[noreturn]] void reject(const char* what, Scalar value) {
  std::ostringstream os;
  os << "invalid model parameters: " << what << " (got " << value << ")";
  throw ParameterError(os.str());
}
}  // namespace detail

template <typename Scalar>
void validate(const ModelParams<Scalar>& p) {
  if (!(p.beta > 0)) detail::reject("beta must be > 0", p.beta);
  if (!(p.c > 0)) detail::reject("c must be > 0", p.c);
  if (!(p.a >= 0)) detail::reject("a must be >= 0", p.a);
  if (!(p.b >= 0)) detail::reject("b must be >= 0", p.b);
  if (!(p.gamma >= 0)) detail::reject("gamma must be >= 0", p.gamma);
  if (!(p.sigma >= 0)) detail::reject("sigma must be >= 0", p.sigma);
  if (!(1 + p.c * p.beta > 0)) detail::reject("second-order condition 1 + c*beta > 0 fails", 1 + p.c * p.beta);
  if (!(p.alpha - p.beta * p.b > 0)) detail::reject("alpha - beta*b must be > 0", p.alpha - p.beta * p.b);
  if (!(p.u_lower() <= 0)) detail::reject("u_min must be <= 0", p.u_lower());
  if (!(p.u_upper() >= 0)) detail::reject("u_max must be >= 0", p.u_upper());
}

template <typename Scalar>
void check_disturbance(const ModelParams<Scalar>& p, Scalar u) {
  if (u < p.u_lower() || u > p.u_upper()) {
    std::ostringstream os;
    os << "disturbance u=" << u << " outside [" << p.u_lower() << ", " << p.u_upper() << "]";
    throw DomainError(os.str());
  }
}

template <typename Scalar>
Scalar demand(const ModelParams<Scalar>& p, Scalar price, Scalar u) {
  return p.alpha - p.beta * price + u;
}

template <typename Scalar>
Scalar cost(const ModelParams<Scalar>& p, Scalar output) {
  return p.a + p.b * output + p.c * output * output;
}

template <typename Scalar>
Scalar profit(const ModelParams<Scalar>& p, Scalar price, Scalar u) {
  validate(p);
  check_disturbance(p, u);
  const Scalar y = demand(p, price, u);
  return price * y - cost(p, y);
}

/// dP*/du, the slope that converts a disturbance gap into a price change.
template <typename Scalar>
Scalar passthrough(const ModelParams<Scalar>& p) {
  validate(p);
  const Scalar cb = p.c * p.beta;
  return (1 + 2 * cb) / (2 * p.beta * (1 + cb));
}

template <typename Scalar>
Scalar sticky_price(const ModelParams<Scalar>& p) {
  validate(p);
  return (p.alpha + p.beta * (2 * p.c * p.alpha + p.b)) / (2 * p.beta * (1 + p.c * p.beta));
}

template <typename Scalar>
Scalar optimal_price(const ModelParams<Scalar>& p, Scalar u) {
  return sticky_price(p) + passthrough(p) * u;
}

template <typename Scalar>
Scalar disturbance_free_output(const ModelParams<Scalar>& p) {
  validate(p);
  return (p.alpha - p.beta * p.b) / (2 * (1 + p.c * p.beta));
}

template <typename Scalar>
Scalar optimal_output(const ModelParams<Scalar>& p, Scalar u) {
  return disturbance_free_output(p) + u / (2 * (1 + p.c * p.beta));
}

/// Profit change from u' = 0 to u' = u when the price tracks the optimum.
template <typename Scalar>
Scalar profit_gain_flexible(const ModelParams<Scalar>& p, Scalar u) {
  validate(p);
  check_disturbance(p, u);
  const Scalar k = p.beta * (1 + p.c * p.beta);
  return (p.alpha - p.beta * p.b) / (2 * k) * u + u * u / (4 * k);
}

/// Profit change from u' = 0 to u' = u with the price stuck at sticky_price.
template <typename Scalar>
Scalar profit_gain_sticky(const ModelParams<Scalar>& p, Scalar u) {
  validate(p);
  check_disturbance(p, u);
  const Scalar k = p.beta * (1 + p.c * p.beta);
  return (p.alpha - p.beta * p.b) / (2 * k) * u - p.c * u * u;
}

/// Per-period loss coefficient: not adjusting to a gap u costs theta*u^2.
template <typename Scalar>
Scalar theta(const ModelParams<Scalar>& p) {
  validate(p);
  const Scalar s = 1 + 2 * p.c * p.beta;
  return s * s / (4 * p.beta * (1 + p.c * p.beta));
}

/// theta written as disturbance-free output times a slope factor.
template <typename Scalar>
Scalar theta_of_output(const ModelParams<Scalar>& p) {
  const Scalar y0 = disturbance_free_output(p);
  const Scalar s = 1 + 2 * p.c * p.beta;
  return y0 * s * s / (2 * p.beta * (p.alpha - p.beta * p.b));
}

/// Optimal symmetric band half-width in disturbance units. Zero menu cost or
/// zero volatility both give a zero band.
template <typename Scalar>
Scalar band_halfwidth(const ModelParams<Scalar>& p) {
  const Scalar th = theta(p);
  if (p.gamma == 0 || p.sigma == 0) return Scalar(0);
  using std::pow;
  using std::sqrt;
  return sqrt(p.sigma) * pow(6 * p.gamma / th, Scalar(0.25));
}

template <typename Scalar>
ComparativeStatics<Scalar> comparative_statics(const ModelParams<Scalar>& p) {
  using std::pow;
  using std::sqrt;
  const Scalar th = theta(p);
  const Scalar cb = p.c * p.beta;
  const Scalar s = 1 + 2 * cb;
  const Scalar q = 1 + cb;

  ComparativeStatics<Scalar> out{};
  out.dtheta_dbeta = -s / (4 * p.beta * p.beta * q * q);
  out.dY_dbeta = -(p.alpha * p.c + p.b) / (2 * q * q);
  if (p.gamma == 0 || p.sigma == 0) {
    out.dh_dtheta = 0;
    out.dh_dbeta = 0;
    return out;
  }
  const Scalar root_sigma = sqrt(p.sigma);
  out.dh_dtheta = -root_sigma * pow(6 * p.gamma, Scalar(0.25)) / (4 * pow(th, Scalar(1.25)));
  const Scalar inner = p.gamma * p.beta * q / (s * s);
  out.dh_dbeta = pow(Scalar(1.5), Scalar(0.25)) * p.gamma * root_sigma / (2 * s * s * s * pow(inner, Scalar(0.75)));
  return out;
}

}  // namespace menucost
