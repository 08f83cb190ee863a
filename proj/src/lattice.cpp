#include "hmod/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "hmod/errors.hpp"

namespace hmod {

TwistedSequence TwistedSequence::delta(LatticePoint p, cplx c) {
  TwistedSequence f;
  f.set(p, c);
  return f;
}

cplx TwistedSequence::at(LatticePoint p) const {
  auto it = entries_.find(p);
  return it == entries_.end() ? cplx{0.0, 0.0} : it->second;
}

void TwistedSequence::set(LatticePoint p, cplx c) {
  if (c == cplx{0.0, 0.0})
    entries_.erase(p);
  else
    entries_[p] = c;
}

void TwistedSequence::add(LatticePoint p, cplx c) { set(p, at(p) + c); }

long TwistedSequence::radius() const {
  long r = 0;
  for (const auto& [p, c] : entries_) r = std::max({r, std::labs(p.n), std::labs(p.m)});
  return r;
}

TwistedSequence TwistedSequence::operator+(const TwistedSequence& o) const {
  TwistedSequence r = *this;
  for (const auto& [p, c] : o.entries_) r.add(p, c);
  return r;
}

TwistedSequence TwistedSequence::operator-(const TwistedSequence& o) const {
  TwistedSequence r = *this;
  for (const auto& [p, c] : o.entries_) r.add(p, -c);
  return r;
}

TwistedSequence TwistedSequence::scaled(cplx c) const {
  TwistedSequence r;
  for (const auto& [p, v] : entries_) r.set(p, v * c);
  return r;
}

nlohmann::json TwistedSequence::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [p, c] : entries_) arr.push_back({p.n, p.m, c.real(), c.imag()});
  return {{"entries", arr}};
}

TwistedSequence TwistedSequence::from_json(const nlohmann::json& j) {
  TwistedSequence f;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 4) throw InvalidInput("sequence entry must be [n, m, re, im]");
    f.add({e[0].get<long>(), e[1].get<long>()}, {e[2].get<double>(), e[3].get<double>()});
  }
  return f;
}

cplx cocycle(double theta, LatticePoint m, LatticePoint n) {
  const long k = n.n * m.m - m.n * n.m;
  if (k == 0) return {1.0, 0.0};
  // reduce theta*k mod 2 so the phase is taken from a small argument
  const double t = std::fmod(std::fmod(theta, 2.0) * static_cast<double>(k), 2.0);
  return std::polar(1.0, kPi * t);
}

TwistedSequence convolve(double theta, const TwistedSequence& f, const TwistedSequence& g) {
  // accumulate per target in a fixed order, then prune exact zeros
  std::map<LatticePoint, cplx> acc;
  for (const auto& [m, fm] : f.entries())
    for (const auto& [k, gk] : g.entries()) {
      const LatticePoint n = m + k;
      acc[n] += fm * gk * cocycle(theta, m, n);
    }
  TwistedSequence r;
  for (const auto& [n, c] : acc) r.set(n, c);
  return r;
}

TwistedSequence adjoint(const TwistedSequence& f) {
  TwistedSequence r;
  for (const auto& [p, c] : f.entries()) r.set(-p, std::conj(c));
  return r;
}

double l1_norm(const TwistedSequence& f) {
  double s = 0.0;
  for (const auto& [p, c] : f.entries()) s += std::abs(c);
  return s;
}

double max_abs_diff(const TwistedSequence& f, const TwistedSequence& g) {
  double d = 0.0;
  for (const auto& [p, c] : f.entries()) d = std::max(d, std::abs(c - g.at(p)));
  for (const auto& [p, c] : g.entries()) d = std::max(d, std::abs(c - f.at(p)));
  return d;
}

}  // namespace hmod
