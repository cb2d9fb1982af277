#include "mechkit/payment.hpp"

#include <algorithm>

namespace mechkit {

struct PaymentCurve::Node {
  PaymentForm form;
  std::optional<AllocationCurve> curve;  // f (myerson) or g (direct)
  Rational pivot{0};
  std::optional<PaymentCurve> inner;          // perturbed
  std::optional<AllocationCurve> perturbation;  // perturbed
};

PaymentCurve PaymentCurve::direct(AllocationCurve g, const Rational& pivot) {
  auto n = std::make_shared<Node>();
  n->form = PaymentForm::direct;
  n->curve = std::move(g);
  n->pivot = pivot;
  return PaymentCurve(std::move(n));
}

PaymentCurve PaymentCurve::perturbed(PaymentCurve inner, AllocationCurve bump) {
  auto n = std::make_shared<Node>();
  n->form = PaymentForm::perturbed;
  n->inner = std::move(inner);
  n->perturbation = std::move(bump);
  return PaymentCurve(std::move(n));
}

PaymentCurve PaymentCurve::myerson_unchecked(AllocationCurve f, const Rational& pivot) {
  auto n = std::make_shared<Node>();
  n->form = f.supports_exact() ? PaymentForm::myerson_closed : PaymentForm::myerson_bracketed;
  n->curve = std::move(f);
  n->pivot = pivot;
  return PaymentCurve(std::move(n));
}

PaymentCurve myerson_payment(const AllocationCurve& f, const Rational& pivot) {
  MonotonicityReport report = is_monotone(f);
  if (!report.monotone) throw NotMonotoneError(std::move(report));
  return PaymentCurve::myerson_unchecked(f, pivot);
}

PaymentForm PaymentCurve::form() const { return node_->form; }

const AllocationCurve& PaymentCurve::base_curve() const {
  if (!node_->curve) throw std::invalid_argument("payment: no base curve on this form");
  return *node_->curve;
}
const Rational& PaymentCurve::pivot() const {
  if (node_->form == PaymentForm::perturbed)
    throw std::invalid_argument("payment: perturbed form has no pivot of its own");
  return node_->pivot;
}
const PaymentCurve& PaymentCurve::inner() const {
  if (node_->form != PaymentForm::perturbed)
    throw std::invalid_argument("payment: not a perturbed form");
  return *node_->inner;
}
const AllocationCurve& PaymentCurve::perturbation() const {
  if (node_->form != PaymentForm::perturbed)
    throw std::invalid_argument("payment: not a perturbed form");
  return *node_->perturbation;
}

bool PaymentCurve::supports_exact() const {
  switch (node_->form) {
    case PaymentForm::myerson_closed:
      return true;
    case PaymentForm::myerson_bracketed:
      return false;
    case PaymentForm::direct:
      return node_->curve->supports_exact();
    case PaymentForm::perturbed:
      return node_->inner->supports_exact() && node_->perturbation->supports_exact();
  }
  return false;
}

std::vector<Rational> PaymentCurve::collect_breakpoints() const {
  std::vector<Rational> out;
  switch (node_->form) {
    case PaymentForm::myerson_closed:
    case PaymentForm::myerson_bracketed:
    case PaymentForm::direct:
      out = node_->curve->collect_breakpoints();
      break;
    case PaymentForm::perturbed: {
      out = node_->inner->collect_breakpoints();
      auto extra = node_->perturbation->collect_breakpoints();
      out.insert(out.end(), extra.begin(), extra.end());
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<Rational> payment_exact(const PaymentCurve& g, const Rational& x) {
  if (x < Rational(0)) throw std::invalid_argument("payment: negative argument");
  switch (g.form()) {
    case PaymentForm::myerson_closed:
    case PaymentForm::myerson_bracketed: {
      auto fx = eval_exact(g.base_curve(), x);
      if (!fx) return std::nullopt;
      auto integral = integrate_exact(g.base_curve(), Rational(0), x);
      if (!integral) return std::nullopt;
      return g.pivot() + x * *fx - *integral;
    }
    case PaymentForm::direct: {
      auto v = eval_exact(g.base_curve(), x);
      if (!v) return std::nullopt;
      return g.pivot() + *v;
    }
    case PaymentForm::perturbed: {
      auto in = payment_exact(g.inner(), x);
      if (!in) return std::nullopt;
      auto bump = eval_exact(g.perturbation(), x);
      if (!bump) return std::nullopt;
      return *in + *bump;
    }
  }
  return std::nullopt;
}

IntervalBound eval_payment(const PaymentCurve& g, const Rational& x,
                           const IntegrationOptions& opts) {
  if (!opts.uniform_darboux) {
    if (auto v = payment_exact(g, x)) return IntervalBound::from_exact(*v);
  }
  switch (g.form()) {
    case PaymentForm::myerson_closed:
    case PaymentForm::myerson_bracketed: {
      const IntervalBound fx = eval_bracket(g.base_curve(), x);
      const IntervalBound integral = integrate(g.base_curve(), Rational(0), x, opts);
      return IntervalBound::from_exact(g.pivot()) + x * fx - integral;
    }
    case PaymentForm::direct:
      return IntervalBound::from_exact(g.pivot()) + eval_bracket(g.base_curve(), x);
    case PaymentForm::perturbed:
      return eval_payment(g.inner(), x, opts) + eval_bracket(g.perturbation(), x);
  }
  throw std::logic_error("eval_payment: unreachable");
}

std::optional<IntervalBound> naive_by_parts_payment(const AllocationCurve& f, const Rational& x) {
  if (x < Rational(0)) throw std::invalid_argument("payment: negative argument");
  switch (f.kind()) {
    case CurveKind::piecewise_constant:
    case CurveKind::cantor:
    case CurveKind::step_series:
      // the classical derivative is 0 wherever defined; the Riemann sums
      // ignore the isolated (or measure-zero) set where it is not
      return IntervalBound::from_exact(Rational(0));
    case CurveKind::piecewise_polynomial: {
      // integral over [0, x] of z * p'(z), piece by piece; jump locations
      // carry no mass
      const auto& bps = f.breakpoints();
      const auto& pieces = f.pieces();
      Rational total(0);
      for (std::size_t j = 0; j < pieces.size(); ++j) {
        const Rational lo = j == 0 ? Rational(0) : bps[j - 1];
        const Rational hi = j < bps.size() ? min(bps[j], x) : x;
        if (!(lo < hi)) continue;
        // z * p'(z) = sum over k of k * c_k * z^k
        const auto& c = pieces[j].coeffs();
        std::vector<Rational> zc(c.size(), Rational(0));
        for (std::size_t k = 1; k < c.size(); ++k)
          zc[k] = Rational(static_cast<std::int64_t>(k)) * c[k];
        const Polynomial anti = Polynomial(std::move(zc)).antiderivative();
        total += anti(hi) - anti(lo);
      }
      return IntervalBound::from_exact(total);
    }
    case CurveKind::sum:
    case CurveKind::scale:
      return std::nullopt;  // no single-family derivative description
  }
  return std::nullopt;
}

}  // namespace mechkit
