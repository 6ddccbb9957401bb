#pragma once

#include <gmpxx.h>

#include <ostream>
#include <string>
#include <utility>

#include "segre/errors.hpp"

namespace segre {

// Exact element of Q(i). Both parts are kept canonical by GMP (lowest terms,
// positive denominators).
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(long re) : re_(re) {}  // NOLINT: implicit from integers is intended
  GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  static GaussianRational i() { return {mpq_class(0), mpq_class(1)}; }

  static GaussianRational fraction(long num, long den, long inum = 0, long iden = 1) {
    if (den == 0 || iden == 0) throw PreconditionError("zero denominator");
    return {mpq_class(num, den), mpq_class(inum, iden)};
  }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }

  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }
  bool is_one() const { return re_ == 1 && sgn(im_) == 0; }

  GaussianRational conj() const { return {re_, -im_}; }
  mpq_class norm() const { return re_ * re_ + im_ * im_; }

  GaussianRational inverse() const {
    if (is_zero()) throw PreconditionError("division by zero in Q(i)");
    mpq_class n = norm();
    return {re_ / n, -im_ / n};
  }

  GaussianRational operator-() const { return {-re_, -im_}; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    if (sgn(im_) == 0 && sgn(o.im_) == 0) {
      re_ *= o.re_;
      return *this;
    }
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class m = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(m);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o) { return *this *= o.inverse(); }

  // this += a * b without temporaries for the real-only case.
  void add_product(const GaussianRational& a, const GaussianRational& b) {
    if (sgn(a.im_) == 0 && sgn(b.im_) == 0) {
      re_ += a.re_ * b.re_;
      return;
    }
    re_ += a.re_ * b.re_ - a.im_ * b.im_;
    im_ += a.re_ * b.im_ + a.im_ * b.re_;
  }

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  // "a/b", "c/d*i" or "a/b+c/d*i"; integers print without denominator.
  std::string to_string() const {
    if (sgn(im_) == 0) return re_.get_str();
    std::string im_part;
    if (im_ == 1) {
      im_part = "i";
    } else if (im_ == -1) {
      im_part = "-i";
    } else {
      im_part = im_.get_str() + "*i";
    }
    if (sgn(re_) == 0) return im_part;
    return re_.get_str() + (sgn(im_) > 0 ? "+" : "") + im_part;
  }

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& q) { return os << q.to_string(); }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

}  // namespace segre
