#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "permugibbs/parallel.hpp"
#include "permugibbs/sampler.hpp"

namespace permugibbs {

SpecificationDomain specification_domain(const PointSet& ps, const BoundaryCondition& eta,
                                         const Volume& volume) {
  if (volume.empty()) throw std::invalid_argument("empty volume");
  SpecificationDomain out;
  out.volume = volume;
  for (Index x : volume) {
    if (volume.contains(eta.forward(ps, x))) out.domain.push_back(x);
    if (volume.contains(eta.inverse(ps, x))) out.image.push_back(x);
  }
  if (out.domain.size() != out.image.size()) {
    throw std::logic_error("boundary is not a bijection on the volume");
  }
  return out;
}

namespace {

std::size_t factorial(std::size_t m) {
  std::size_t f = 1;
  for (std::size_t k = 2; k <= m; ++k) f *= k;
  return f;
}

void check_cap(std::size_t m, const EnumerationOptions& opts) {
  if (opts.cap > kHardEnumerationCap) {
    std::ostringstream os;
    os << "enumeration cap " << opts.cap << " exceeds the hard limit " << kHardEnumerationCap;
    throw std::length_error(os.str());
  }
  if (m > opts.cap) {
    std::ostringstream os;
    os << "enumeration cap exceeded: |D| = " << m << " > cap " << opts.cap;
    throw std::length_error(os.str());
  }
}

// Fills rows [first, first + count) with consecutive lexicographic
// permutations starting at `start`.
void fill_block(std::vector<std::uint8_t> start, std::size_t first, std::size_t count,
                const std::vector<double>& dom_coord, const std::vector<double>& img_coord,
                const Potential& v, std::vector<std::uint8_t>& perms, std::vector<double>& energy) {
  const std::size_t m = start.size();
  for (std::size_t r = 0; r < count; ++r) {
    const std::size_t row = first + r;
    double h = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      perms[row * m + k] = start[k];
      h += v(img_coord[start[k]] - dom_coord[k]);
    }
    energy[row] = h;
    std::next_permutation(start.begin(), start.end());
  }
}

}  // namespace

SpecificationTable::SpecificationTable(PointSet ps, BoundaryCondition eta, Potential v,
                                       SpecificationDomain dom)
    : ps_(std::move(ps)), eta_(std::move(eta)), v_(v), dom_(std::move(dom)) {
  width_ = dom_.domain.size();
}

void SpecificationTable::normalise() {
  double lo = std::numeric_limits<double>::infinity();
  for (double e : energy_) lo = std::min(lo, e);
  double acc = 0.0;
  for (double e : energy_) acc += std::exp(-(e - lo));
  log_z_ = -lo + std::log(acc);
  prob_.resize(energy_.size());
  for (std::size_t s = 0; s < energy_.size(); ++s) prob_[s] = std::exp(-energy_[s] - log_z_);
}

double SpecificationTable::partition() const { return std::exp(log_z_); }

std::span<const std::uint8_t> SpecificationTable::assignment(std::size_t s) const {
  if (s >= size()) throw std::out_of_range("state id out of range");
  return {perms_.data() + s * width_, width_};
}

Index SpecificationTable::image_of(std::size_t s, Index x) const {
  const auto& d = dom_.domain;
  auto it = std::lower_bound(d.begin(), d.end(), x);
  if (it == d.end() || *it != x) return eta_.forward(ps_, x);
  return dom_.image[assignment(s)[static_cast<std::size_t>(it - d.begin())]];
}

Index SpecificationTable::preimage_of(std::size_t s, Index t) const {
  const auto& im = dom_.image;
  auto it = std::lower_bound(im.begin(), im.end(), t);
  if (it == im.end() || *it != t) return eta_.inverse(ps_, t);
  const auto pos = static_cast<std::uint8_t>(it - im.begin());
  const auto a = assignment(s);
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] == pos) return dom_.domain[k];
  }
  throw std::logic_error("corrupt assignment");
}

WindowPermutation SpecificationTable::materialize(std::size_t s) const {
  WindowPermutation sigma(ps_, eta_, window_for(ps_, eta_, dom_.volume));
  std::vector<Index> images;
  images.reserve(width_);
  for (std::uint8_t p : assignment(s)) images.push_back(dom_.image[p]);
  sigma.assign(dom_.domain, images);
  return sigma;
}

FlowValue SpecificationTable::flow(std::size_t s) const {
  if (!eta_.finite_flow()) return eta_.flow();
  const auto& pts = dom_.volume.points();
  const Index j = pts[(pts.size() - 1) / 2];
  return flow_at(materialize(s), j).flow;
}

std::size_t SpecificationTable::find(std::span<const std::uint8_t> a) const {
  if (a.size() != width_) return size();
  // Lehmer rank in lexicographic order
  std::size_t rank = 0;
  std::vector<bool> used(width_, false);
  for (std::size_t k = 0; k < width_; ++k) {
    if (a[k] >= width_ || used[a[k]]) return size();
    std::size_t smaller = 0;
    for (std::uint8_t q = 0; q < a[k]; ++q) smaller += used[q] ? 0 : 1;
    used[a[k]] = true;
    rank += smaller * factorial(width_ - k - 1);
  }
  return rank;
}

namespace {

struct Prepared {
  SpecificationDomain dom;
  std::vector<double> dom_coord;
  std::vector<double> img_coord;
  std::size_t states = 1;
};

Prepared prepare(const PointSet& ps, const BoundaryCondition& eta, const Volume& volume,
                 const EnumerationOptions& opts) {
  Prepared p;
  p.dom = specification_domain(ps, eta, volume);
  const std::size_t m = p.dom.domain.size();
  check_cap(m, opts);
  for (Index x : p.dom.domain) p.dom_coord.push_back(ps.at(x));
  for (Index t : p.dom.image) p.img_coord.push_back(ps.at(t));
  p.states = factorial(m);
  return p;
}

}  // namespace

SpecificationTable enumerate_compatible_serial(const PointSet& ps, const BoundaryCondition& eta,
                                               const Volume& volume, const Potential& v,
                                               const EnumerationOptions& opts) {
  Prepared p = prepare(ps, eta, volume, opts);
  const std::size_t m = p.dom.domain.size();
  SpecificationTable t(ps, eta, v, std::move(p.dom));
  t.perms_.resize(p.states * m);
  t.energy_.resize(p.states);
  std::vector<std::uint8_t> start(m);
  std::iota(start.begin(), start.end(), std::uint8_t{0});
  fill_block(start, 0, p.states, p.dom_coord, p.img_coord, v, t.perms_, t.energy_);
  t.normalise();
  return t;
}

SpecificationTable enumerate_compatible(const PointSet& ps, const BoundaryCondition& eta,
                                        const Volume& volume, const Potential& v,
                                        const EnumerationOptions& opts) {
  Prepared p = prepare(ps, eta, volume, opts);
  const std::size_t m = p.dom.domain.size();
  SpecificationTable t(ps, eta, v, std::move(p.dom));
  t.perms_.resize(p.states * m);
  t.energy_.resize(p.states);
  if (m < 2) {
    std::vector<std::uint8_t> start(m, 0);
    fill_block(start, 0, p.states, p.dom_coord, p.img_coord, v, t.perms_, t.energy_);
  } else {
    const std::size_t block = p.states / m;
    const auto blocks = static_cast<std::int64_t>(m);
#pragma omp parallel for schedule(dynamic) num_threads(thread_budget())
    for (std::int64_t f = 0; f < blocks; ++f) {
      // smallest permutation with first element f
      std::vector<std::uint8_t> start;
      start.push_back(static_cast<std::uint8_t>(f));
      for (std::size_t q = 0; q < m; ++q) {
        if (q != static_cast<std::size_t>(f)) start.push_back(static_cast<std::uint8_t>(q));
      }
      fill_block(std::move(start), static_cast<std::size_t>(f) * block, block, p.dom_coord,
                 p.img_coord, v, t.perms_, t.energy_);
    }
  }
  t.normalise();
  return t;
}

double exact_probability(const SpecificationTable& table,
                         const std::function<bool(const StateView&)>& event) {
  double acc = 0.0;
  for (std::size_t s = 0; s < table.size(); ++s) {
    if (event(StateView(table, s))) acc += table.probability(s);
  }
  return acc;
}

double transition_probability(const SpecificationTable& table, std::size_t s, std::size_t t) {
  const std::size_t m = table.domain().size();
  if (m < 2) return s == t ? 1.0 : 0.0;
  const double pair = 2.0 / (static_cast<double>(m) * static_cast<double>(m - 1));
  if (s == t) {
    double stay = 1.0;
    std::vector<std::uint8_t> a(table.assignment(s).begin(), table.assignment(s).end());
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        std::swap(a[i], a[j]);
        const std::size_t u = table.find(a);
        stay -= pair * metropolis_acceptance(table.energy(s) - table.energy(u));
        std::swap(a[i], a[j]);
      }
    }
    return stay;
  }
  const auto a = table.assignment(s);
  const auto b = table.assignment(t);
  std::size_t diff = 0;
  for (std::size_t k = 0; k < m; ++k) diff += a[k] != b[k] ? 1 : 0;
  if (diff != 2) return 0.0;
  return pair * metropolis_acceptance(table.energy(s) - table.energy(t));
}

}  // namespace permugibbs
