#pragma once

#include <complex>
#include <compare>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace hmod {

using cplx = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

struct LatticePoint {
  long n = 0;
  long m = 0;
  auto operator<=>(const LatticePoint&) const = default;
  LatticePoint operator+(const LatticePoint& o) const { return {n + o.n, m + o.m}; }
  LatticePoint operator-(const LatticePoint& o) const { return {n - o.n, m - o.m}; }
  LatticePoint operator-() const { return {-n, -m}; }
};

// Finitely supported map Z^2 -> C. Zero entries are never stored, so
// equality of sequences is equality of maps.
class TwistedSequence {
 public:
  using Map = std::map<LatticePoint, cplx>;

  TwistedSequence() = default;
  static TwistedSequence delta(LatticePoint p, cplx c = 1.0);

  cplx at(LatticePoint p) const;
  void set(LatticePoint p, cplx c);
  void add(LatticePoint p, cplx c);

  const Map& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // Largest |n| or |m| over the support.
  long radius() const;

  TwistedSequence operator+(const TwistedSequence& o) const;
  TwistedSequence operator-(const TwistedSequence& o) const;
  TwistedSequence scaled(cplx c) const;
  bool operator==(const TwistedSequence&) const = default;

  nlohmann::json to_json() const;
  static TwistedSequence from_json(const nlohmann::json& j);

 private:
  Map entries_;
};

// sigma_theta(m, n) with m = (x1, y1), n = (x2, y2): exp(i pi theta (x2 y1 - x1 y2)).
cplx cocycle(double theta, LatticePoint m, LatticePoint n);

TwistedSequence convolve(double theta, const TwistedSequence& f, const TwistedSequence& g);
TwistedSequence adjoint(const TwistedSequence& f);
double l1_norm(const TwistedSequence& f);
// Entrywise sup distance over the union of supports.
double max_abs_diff(const TwistedSequence& f, const TwistedSequence& g);

}  // namespace hmod
