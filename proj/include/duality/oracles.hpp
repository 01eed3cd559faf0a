#pragma once

// Oracle contracts. Every oracle is a pure function of its inputs wrapped with
// a call counter, so derived oracles can be shared across threads.

#include "duality/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>

namespace duality {

/// Weak membership oracle for a convex set K ⊆ R^n.
///
/// query(x, delta) must never answer InThickened for x ∉ S(K, delta) nor
/// NotInShrunk for x ∈ S(K, -delta). Inside the band between the two sets
/// either answer is legal.
class WmemOracle {
 public:
  using QueryFn = std::function<WeakVerdict(const Vector &, double)>;

  WmemOracle(int dim, QueryFn fn, std::optional<CenteredBody> body = std::nullopt,
             CounterPtr counter = nullptr)
      : dim_(dim),
        fn_(std::move(fn)),
        body_(std::move(body)),
        counter_(counter ? std::move(counter) : make_counter("wmem")) {
    require(dim_ > 0, "oracle dimension must be positive");
    require(static_cast<bool>(fn_), "oracle query function is empty");
    if (body_) require(body_->dim() == dim_, "centering data dimension mismatch");
  }

  WeakVerdict query(const Vector &x, double delta) const {
    if (x.size() != dim_) throw InvalidArgument("wmem query: dimension mismatch");
    if (!(delta > 0.0)) throw InvalidArgument("wmem query: delta must be positive");
    counter_->increment();
    return fn_(x, delta);
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const std::optional<CenteredBody> &body() const noexcept { return body_; }
  [[nodiscard]] const CenteredBody &centered() const {
    if (!body_) throw InvalidArgument("oracle carries no centering data");
    return *body_;
  }
  [[nodiscard]] const CounterPtr &counter() const noexcept { return counter_; }
  [[nodiscard]] std::uint64_t calls() const noexcept { return counter_->count(); }

 private:
  int dim_;
  QueryFn fn_;
  std::optional<CenteredBody> body_;
  CounterPtr counter_;
};

/// Affine subspace H = offset + span(basis columns); basis is orthonormal.
struct AffineFrame {
  Vector offset;
  Matrix basis;

  [[nodiscard]] int ambient_dim() const { return static_cast<int>(offset.size()); }
  [[nodiscard]] int dim() const { return static_cast<int>(basis.cols()); }

  [[nodiscard]] Vector to_ambient(const Vector &u) const { return offset + basis * u; }
  [[nodiscard]] Vector to_local(const Vector &x) const { return basis.transpose() * (x - offset); }
  [[nodiscard]] Vector project(const Vector &x) const { return to_ambient(to_local(x)); }
};

/// Weak membership for a set K relative to its affine hull H. Queries are
/// only meaningful for points of H; callers project first.
class RelativeWmemOracle {
 public:
  using QueryFn = std::function<WeakVerdict(const Vector &, double)>;

  RelativeWmemOracle(AffineFrame frame, QueryFn fn, CounterPtr counter = nullptr)
      : frame_(std::move(frame)),
        fn_(std::move(fn)),
        counter_(counter ? std::move(counter) : make_counter("relative-wmem")) {
    require(static_cast<bool>(fn_), "oracle query function is empty");
  }

  WeakVerdict query(const Vector &x, double delta) const {
    if (x.size() != frame_.ambient_dim()) throw InvalidArgument("relative wmem query: dimension mismatch");
    if (!(delta > 0.0)) throw InvalidArgument("relative wmem query: delta must be positive");
    counter_->increment();
    return fn_(x, delta);
  }

  [[nodiscard]] const AffineFrame &frame() const noexcept { return frame_; }
  [[nodiscard]] const CounterPtr &counter() const noexcept { return counter_; }
  [[nodiscard]] std::uint64_t calls() const noexcept { return counter_->count(); }

 private:
  AffineFrame frame_;
  QueryFn fn_;
  CounterPtr counter_;
};

/// delta-approximation of a norm: nu(x) - delta < eval(x, delta) < nu(x) + delta
/// for 1/2 < |x| < 3/2.
class NormApproxOracle {
 public:
  using EvalFn = std::function<double(const Vector &, double)>;

  NormApproxOracle(NormDescriptor desc, EvalFn fn, CounterPtr counter = nullptr)
      : desc_(desc), fn_(std::move(fn)), counter_(counter ? std::move(counter) : make_counter("approx")) {
    require(static_cast<bool>(fn_), "oracle evaluation function is empty");
  }

  double eval(const Vector &x, double delta) const {
    if (x.size() != desc_.n) throw InvalidArgument("norm approx: dimension mismatch");
    if (!(delta > 0.0)) throw InvalidArgument("norm approx: delta must be positive");
    counter_->increment();
    return fn_(x, delta);
  }

  [[nodiscard]] const NormDescriptor &descriptor() const noexcept { return desc_; }
  [[nodiscard]] const CounterPtr &counter() const noexcept { return counter_; }
  [[nodiscard]] std::uint64_t calls() const noexcept { return counter_->count(); }

 private:
  NormDescriptor desc_;
  EvalFn fn_;
  CounterPtr counter_;
};

/// epsilon-approximation of a function f on all of R^n, or on a centered body.
class FunctionApproxOracle {
 public:
  using EvalFn = std::function<double(const Vector &, double)>;

  FunctionApproxOracle(int dim, EvalFn fn, std::optional<CenteredBody> domain = std::nullopt,
                       CounterPtr counter = nullptr)
      : dim_(dim),
        fn_(std::move(fn)),
        domain_(std::move(domain)),
        counter_(counter ? std::move(counter) : make_counter("function")) {
    require(dim_ > 0, "function dimension must be positive");
    require(static_cast<bool>(fn_), "oracle evaluation function is empty");
  }

  double eval(const Vector &x, double eps) const {
    if (x.size() != dim_) throw InvalidArgument("function approx: dimension mismatch");
    if (!(eps > 0.0)) throw InvalidArgument("function approx: eps must be positive");
    counter_->increment();
    return fn_(x, eps);
  }

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const std::optional<CenteredBody> &domain() const noexcept { return domain_; }
  [[nodiscard]] const CounterPtr &counter() const noexcept { return counter_; }
  [[nodiscard]] std::uint64_t calls() const noexcept { return counter_->count(); }

 private:
  int dim_;
  EvalFn fn_;
  std::optional<CenteredBody> domain_;
  CounterPtr counter_;
};

/// Adapter from an exact membership predicate. K ⊆ S(K, delta) and the
/// complement of K misses S(K, -delta), so answering from exact membership
/// always satisfies the weak contract.
template <class Pred>
WmemOracle exact_to_weak(int dim, Pred member, std::optional<CenteredBody> body = std::nullopt,
                         std::string label = "exact") {
  return WmemOracle(
      dim,
      [member = std::move(member)](const Vector &x, double) {
        return member(x) ? WeakVerdict::InThickened : WeakVerdict::NotInShrunk;
      },
      std::move(body), make_counter(std::move(label)));
}

}  // namespace duality
