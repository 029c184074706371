// SPDX-License-Identifier: Apache-2.0
//
// oddmcal - online phase-shifter calibration for DDM MIMO radar
// Copyright (C) 2026 The oddmcal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "oddmcal/codes.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "oddmcal/dsp.hpp"

namespace oddm {

std::string to_string(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << '/' << r.denominator();
  return os.str();
}

TxCode::TxCode(int order, int factor) : order_(order), factor_(factor) {
  if (order < 1) throw std::invalid_argument("PSK order must be positive");
  if (factor < 0 || factor >= order)
    throw std::invalid_argument("PSK factor must satisfy 0 <= p < L (got L=" + std::to_string(order) +
                                ", p=" + std::to_string(factor) + ")");
}

TxCode TxCode::reduced() const {
  const int g = std::gcd(order_, factor_);  // gcd(L, 0) = L
  return {order_ / g, factor_ / g};
}

double TxCode::phase_step() const { return 2.0 * kPi * factor_ / order_; }

CodeSet::CodeSet(int ramps, std::vector<TxCode> codes) : ramps_(ramps), codes_(std::move(codes)) {
  if (ramps < 1) throw std::invalid_argument("ramp count must be positive");
  if (codes_.empty()) throw std::invalid_argument("a code set needs at least one Tx");
}

std::vector<int> CodeSet::reduced_orders() const {
  std::vector<int> out;
  out.reserve(codes_.size());
  for (const auto& c : codes_) out.push_back(c.reduced().order());
  return out;
}

bool CodeSet::shifts_distinct() const {
  std::set<Rational> seen;
  for (const auto& c : codes_)
    if (!seen.insert(c.reduced().normalized_shift()).second) return false;
  return true;
}

namespace {

Rational circular_distance(const Rational& a, const Rational& b) {
  Rational d = mod_positive(a - b, 1);
  return std::min(d, Rational(1) - d);
}

}  // namespace

Rational CodeSet::min_shift_distance() const {
  if (codes_.size() < 2) return Rational(ramps_);
  Rational best(1);
  for (std::size_t a = 0; a < codes_.size(); ++a)
    for (std::size_t b = a + 1; b < codes_.size(); ++b)
      best = std::min(best, circular_distance(codes_[a].normalized_shift(), codes_[b].normalized_shift()));
  return best * std::int64_t(ramps_);
}

ComplexVector gen_code(const TxCode& tx, int ramps) {
  const ComplexVector points = ideal_constellation(tx);
  ComplexVector out(ramps);
  for (int m = 0; m < ramps; ++m) out(m) = points(m % tx.order());
  return out;
}

ComplexVector ideal_constellation(const TxCode& tx) {
  ComplexVector out(tx.order());
  for (int n = 0; n < tx.order(); ++n) out(n) = dsp::exp_j_pi(Rational(2 * n * tx.factor(), tx.order()));
  return out;
}

Complex dirichlet_tone(const Rational& shift, int bin, int ramps) {
  const Rational x = shift - Rational(bin);
  const Rational m(ramps);
  if (is_integer(x)) {
    // integer offset: M on the (circular) mainlobe, exactly zero elsewhere
    return (x.numerator() % ramps == 0) ? Complex(ramps, 0.0) : Complex(0.0, 0.0);
  }
  // linear phase of the DFT definition times the starting-phase term, then the
  // windowing magnitude sin(pi x) / sin(pi x / M)
  const Complex phase = dsp::exp_j_pi(x * (m - 1) / m);
  return phase * (dsp::sin_pi(x) / dsp::sin_pi(x / m));
}

Complex code_spectrum_closed_form(const TxCode& tx, int ramps, int mu) {
  if (mu < 0 || mu >= ramps) throw std::out_of_range("Doppler bin outside [0, M)");
  return dirichlet_tone(tx.doppler_shift(ramps), mu, ramps);
}

double peak_gain(const TxCode& tx, int ramps) {
  const Rational d = mod_positive(tx.doppler_shift(ramps), ramps);
  if (is_integer(d)) return 1.0;
  const auto lo = static_cast<int>(d.numerator() / d.denominator());
  const double a = std::abs(dirichlet_tone(d, lo, ramps));
  const double b = std::abs(dirichlet_tone(d, (lo + 1) % ramps, ramps));
  return std::max(a, b) / ramps;
}

namespace {

void check_index(const CodeSet& codes, std::size_t i) {
  if (i >= codes.size()) throw std::out_of_range("Tx index out of range");
}

Feasibility make_feasibility(std::int64_t num, std::int64_t den) {
  Feasibility f{Rational(num, den), false};
  f.feasible = f.ratio > Rational(2);
  return f;
}

}  // namespace

Feasibility feasibility_strict(const CodeSet& codes, std::size_t i) {
  check_index(codes, i);
  const auto orders = codes.reduced_orders();
  std::int64_t prod = 1;
  for (std::size_t k = 0; k < orders.size(); ++k)
    if (k != i) prod *= orders[k];
  return make_feasibility(orders[i], prod);
}

Feasibility feasibility_gcd(const CodeSet& codes, std::size_t i) {
  check_index(codes, i);
  const auto orders = codes.reduced_orders();
  std::int64_t prod = 1;
  for (std::size_t k = 0; k < orders.size(); ++k)
    if (k != i) prod *= std::gcd(orders[i], orders[k]);
  return make_feasibility(orders[i], prod);
}

int euler_phi(int n) {
  int result = n;
  for (int p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

std::vector<MinOrderRow> min_psk_order_table(int max_ntx, Criterion criterion) {
  if (max_ntx < 2) throw std::invalid_argument("max_ntx must be at least 2");
  constexpr int kMaxOrder = 1024;

  std::vector<int> candidates;
  for (int l = 1; l <= kMaxOrder; ++l) {
    const bool pow2 = (l & (l - 1)) == 0;
    if (criterion == Criterion::Gcd || pow2) candidates.push_back(l);
  }

  std::vector<MinOrderRow> rows;
  for (int ntx = 2; ntx <= max_ntx; ++ntx) {
    MinOrderRow row{ntx, 0, {}};
    for (int l0 : candidates) {
      // Each usable order contributes euler_phi(L) distinct shifts; Tx 0 takes one
      // of its own. Picking the cheapest N_tx - 1 slots minimizes the denominator.
      struct Slot {
        std::int64_t cost;
        int order;
      };
      std::vector<Slot> slots;
      for (int l : candidates) {
        if (l > l0) break;
        int capacity = euler_phi(l);
        if (l == l0) --capacity;
        const std::int64_t cost = criterion == Criterion::Strict ? l : std::gcd(l0, l);
        for (int c = 0; c < capacity; ++c) slots.push_back({cost, l});
      }
      if (static_cast<int>(slots.size()) < ntx - 1) continue;
      std::stable_sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) {
        return a.cost != b.cost ? a.cost < b.cost : a.order < b.order;
      });
      std::int64_t prod = 1;
      for (int k = 0; k < ntx - 1; ++k) prod *= slots[k].cost;
      if (Rational(l0, prod) > Rational(2)) {
        row.min_order = l0;
        row.example.push_back(l0);
        std::vector<int> others;
        for (int k = 0; k < ntx - 1; ++k) others.push_back(slots[k].order);
        std::sort(others.rbegin(), others.rend());
        row.example.insert(row.example.end(), others.begin(), others.end());
        break;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

struct DesignSearch {
  std::size_t tx_of_interest;
  int order_i;
  int bound;
  std::vector<TxCode> current;
  std::vector<bool> assigned;
  std::vector<TxCode> best;
  Rational best_distance{-1};
  bool found = false;

  Rational assigned_min_distance() const {
    Rational d(1);
    for (std::size_t a = 0; a < current.size(); ++a) {
      if (!assigned[a]) continue;
      for (std::size_t b = a + 1; b < current.size(); ++b)
        if (assigned[b])
          d = std::min(d, circular_distance(current[a].normalized_shift(), current[b].normalized_shift()));
    }
    return d;
  }

  bool clashes(const TxCode& code) const {
    for (std::size_t j = 0; j < current.size(); ++j)
      if (assigned[j] && current[j].normalized_shift() == code.normalized_shift()) return true;
    return false;
  }

  // gcd_prod: product of gcd(L_i, L_k) over the assigned k != i
  void recurse(std::size_t k, std::int64_t gcd_prod) {
    if (k == tx_of_interest) {
      recurse(k + 1, gcd_prod);
      return;
    }
    if (k == current.size()) {
      const Rational d = assigned_min_distance();
      if (!found || d > best_distance) {
        best = current;
        best_distance = d;
        found = true;
      }
      return;
    }
    for (int l = 1; l <= bound; ++l) {
      const std::int64_t g = std::gcd(order_i, l);
      if (2 * gcd_prod * g >= order_i) continue;
      for (int p = 0; p < l; ++p) {
        if (std::gcd(l, p) != 1) continue;  // reduced codes only; L=1 keeps p=0
        const TxCode code(l, p);
        if (clashes(code)) continue;
        current[k] = code;
        assigned[k] = true;
        // assigned codes already closer than the incumbent cannot win
        if (!found || assigned_min_distance() > best_distance) recurse(k + 1, gcd_prod * g);
        assigned[k] = false;
      }
    }
  }
};

}  // namespace

CodeSet design_calibration_code(const CodeSet& operational, std::size_t i) {
  if (i >= operational.size()) throw std::out_of_range("Tx index out of range");
  const TxCode keep = operational[i];
  const int order_i = keep.reduced().order();
  if (order_i <= 2)
    throw InfeasibleCode("Tx " + std::to_string(i) + " has reduced PSK order " + std::to_string(order_i) +
                         "; the gcd condition needs an order of at least 3");

  if (feasibility_gcd(operational, i).feasible && operational.shifts_distinct()) return operational;

  constexpr int kMaxBound = 64;
  for (int bound = 1; bound <= kMaxBound; ++bound) {
    DesignSearch s{i, order_i, bound, operational.codes(), std::vector<bool>(operational.size(), false), {}, Rational(-1),
                   false};
    s.current[i] = keep.reduced();
    s.assigned[i] = true;
    s.recurse(0, 1);
    if (s.found) {
      s.best[i] = keep;
      return CodeSet(operational.ramps(), std::move(s.best));
    }
  }
  throw InfeasibleCode("no calibration code with orders up to " + std::to_string(kMaxBound));
}

std::vector<Rational> spur_offsets(const TxCode& tx) {
  const TxCode r = tx.reduced();
  std::vector<Rational> out;
  out.reserve(r.order());
  for (int g = 0; g < r.order(); ++g) out.push_back(mod_positive(Rational(g) * r.normalized_shift(), 1));
  return out;
}

int spur_overlap_count(const TxCode& a, const TxCode& b) {
  const auto sa = spur_offsets(a);
  const auto sb = spur_offsets(b);
  const std::set<Rational> set_a(sa.begin(), sa.end());
  int count = 0;
  for (const auto& x : std::set<Rational>(sb.begin(), sb.end())) count += set_a.count(x) ? 1 : 0;
  return count;
}

}  // namespace oddm
