#include "gspc/association.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace gspc {

int Association::find_position(int k, int ue, int f) const {
  const auto& u = served[k];
  const auto it = std::lower_bound(u.begin(), u.end(), ue);
  if (it == u.end() || *it != ue) return -1;
  return position(k, f, static_cast<int>(it - u.begin()));
}

Association initial_association(const LsfMap& lsf, const NetworkLayout& layout) {
  const int K = layout.num_bs();
  const int L = layout.num_ue();
  const int F = layout.num_fc();

  Association a;
  a.num_fc = F;
  a.served.resize(K);
  a.servers.resize(L);

  for (int k = 0; k < K; ++k) {
    // Ranking metric: arithmetic mean of dB gains across FCs.
    std::vector<double> metric(L, 0.0);
    for (int l = 0; l < L; ++l) {
      double db = 0.0;
      for (int f = 0; f < F; ++f) db += 10.0 * std::log10(lsf.gain(k, l, f));
      metric[l] = db / F;
    }
    std::vector<int> order(L);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
      return metric[x] > metric[y];  // stable: lower UE index wins ties
    });
    const int take = std::min(layout.bss[k].antennas, L);
    a.served[k].assign(order.begin(), order.begin() + take);
    std::sort(a.served[k].begin(), a.served[k].end());
    for (int l : a.served[k]) a.servers[l].push_back(k);
  }
  for (int l = 0; l < L; ++l)
    if (a.servers[l].empty()) a.dropped_ues.push_back(l);

  a.run_start.resize(K);
  int pos = 0;
  for (int k = 0; k < K; ++k) {
    a.run_start[k] = pos;
    pos += F * static_cast<int>(a.served[k].size());
  }
  a.size = pos;
  a.pos_bs.resize(pos);
  a.pos_ue.resize(pos);
  a.pos_fc.resize(pos);
  for (int k = 0; k < K; ++k)
    for (int f = 0; f < F; ++f)
      for (int i = 0; i < static_cast<int>(a.served[k].size()); ++i) {
        const int p = a.position(k, f, i);
        a.pos_bs[p] = k;
        a.pos_fc[p] = f;
        a.pos_ue[p] = a.served[k][i];
      }
  return a;
}

namespace {

// Addition-only big integer (base 1e9 limbs, little-endian); Pascal's rule
// builds the binomials so no multiplication is ever needed.
struct BigInt {
  std::vector<std::uint32_t> limbs{0};

  static constexpr std::uint32_t kBase = 1000000000u;

  void add(const BigInt& o) {
    const std::size_t n = std::max(limbs.size(), o.limbs.size());
    limbs.resize(n, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t s = carry + limbs[i] + (i < o.limbs.size() ? o.limbs[i] : 0);
      limbs[i] = static_cast<std::uint32_t>(s % kBase);
      carry = s / kBase;
    }
    if (carry) limbs.push_back(static_cast<std::uint32_t>(carry));
  }

  std::string str() const {
    std::string s = std::to_string(limbs.back());
    for (std::size_t i = limbs.size() - 1; i-- > 0;) {
      std::string part = std::to_string(limbs[i]);
      s += std::string(9 - part.size(), '0') + part;
    }
    return s;
  }
};

BigInt from_u64(std::uint64_t v) {
  BigInt b;
  b.limbs.clear();
  do {
    b.limbs.push_back(static_cast<std::uint32_t>(v % BigInt::kBase));
    v /= BigInt::kBase;
  } while (v);
  return b;
}

}  // namespace

std::string association_count_bound(const std::vector<int>& antennas, int F,
                                    int L) {
  if (L <= 0) return "0";
  // Pascal row: binom[n] = C(L, n).
  std::vector<BigInt> binom(L + 1, from_u64(0));
  binom[0] = from_u64(1);
  for (int row = 1; row <= L; ++row)
    for (int n = row; n >= 1; --n) binom[n].add(binom[n - 1]);

  // Prefix sums S(m) = sum_{n=1}^{m} C(L, n), shared across equal m.
  std::vector<BigInt> prefix(L + 1, from_u64(0));
  for (int m = 1; m <= L; ++m) {
    prefix[m] = prefix[m - 1];
    prefix[m].add(binom[m]);
  }

  BigInt total = from_u64(0);
  for (int nk : antennas) {
    const long long cap = static_cast<long long>(F) * nk;
    const int m = static_cast<int>(std::min<long long>(cap, L));
    if (m >= 1) total.add(prefix[m]);
  }
  return total.str();
}

std::string association_count_bound(const NetworkLayout& layout) {
  std::vector<int> antennas;
  antennas.reserve(layout.bss.size());
  for (const auto& bs : layout.bss) antennas.push_back(bs.antennas);
  return association_count_bound(antennas, layout.num_fc(), layout.num_ue());
}

}  // namespace gspc
