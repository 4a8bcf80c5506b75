#include "flatflow/balance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "flatflow/error.hpp"
#include "flatflow/parallel.hpp"

namespace flatflow {

namespace {

constexpr int kMaxCellBits = 26;

void check_depth(const PartitionParams& params, int h) {
  if (h < 0 || h > params.p) throw Error(ErrorCode::InvalidArgument, "depth must lie in [0, p]");
}

// Depth-h counts obtained by summing groups of z^(p-h) finest counts.
std::vector<std::uint64_t> coarsen(const std::vector<std::uint64_t>& fine, const PartitionParams& params, int from,
                                   int to) {
  const int shift = params.z1 * (from - to);
  std::vector<std::uint64_t> out(params.cells(to), 0);
  for (std::size_t i = 0; i < fine.size(); ++i) out[i >> shift] += fine[i];
  return out;
}

std::vector<std::vector<std::uint64_t>> all_counts(std::span<const double> points, const PartitionParams& params) {
  std::vector<std::vector<std::uint64_t>> counts(static_cast<std::size_t>(params.p) + 1);
  counts.back() = cell_counts(points, params, params.p);
  for (int h = params.p - 1; h >= 0; --h)
    counts[static_cast<std::size_t>(h)] = coarsen(counts[static_cast<std::size_t>(h) + 1], params, h + 1, h);
  return counts;
}

// Sum over finest cells of (c - parent/z^(p-h))^2. With z a power of two the
// division is exact.
double s_from_counts(const std::vector<std::uint64_t>& finest, const std::vector<std::uint64_t>& coarse,
                     const PartitionParams& params, int h) {
  const int shift = params.z1 * (params.p - h);
  double total = 0.0;
  for (std::size_t i = 0; i < finest.size(); ++i) {
    const double d = static_cast<double>(finest[i]) - std::ldexp(static_cast<double>(coarse[i >> shift]), -shift);
    total += d * d;
  }
  return total;
}

CellBalance balance_from_counts(const std::vector<std::uint64_t>& parent, const std::vector<std::uint64_t>& children,
                                int depth, std::uint64_t index, std::size_t M, double delta,
                                const PartitionParams& params) {
  CellBalance cb;
  cb.depth = depth;
  cb.index = index;
  cb.count = parent[index];
  const double expected = std::ldexp(static_cast<double>(cb.count), -params.z1);
  cb.allowance = delta * static_cast<double>(M) * std::ldexp(1.0, -params.z1 * (depth + 1));
  cb.balanced = true;
  for (std::uint64_t s = 0; s < params.z(); ++s) {
    const std::uint64_t c = children[(index << params.z1) + s];
    cb.child_counts.push_back(c);
    const double dev = std::abs(static_cast<double>(c) - expected);
    cb.worst_deviation = std::max(cb.worst_deviation, dev);
    if (!(dev < cb.allowance)) cb.balanced = false;
  }
  return cb;
}

std::vector<double> sorted_copy(std::span<const double> points) {
  std::vector<double> x(points.begin(), points.end());
  std::sort(x.begin(), x.end());
  return x;
}

}  // namespace

void validate(const PartitionParams& params) {
  if (params.z1 < 1) throw Error(ErrorCode::InvalidArgument, "z must be a power of two, at least 2");
  if (params.p < 1) throw Error(ErrorCode::InvalidArgument, "depth p must be at least 1");
  if (params.z1 * params.p > kMaxCellBits) throw Error(ErrorCode::InvalidArgument, "z^p exceeds 2^26 cells");
}

void validate_points(std::span<const double> points) {
  for (double x : points)
    if (!(x >= 0.0 && x < 1.0)) throw Error(ErrorCode::InvalidArgument, "points must lie in [0, 1)");
}

std::uint64_t cell_index(double x, const PartitionParams& params, int h) {
  const std::uint64_t n = params.cells(h);
  // Scaling by a power of two is exact, so floor decides boundaries exactly.
  const double scaled = std::floor(std::ldexp(x, params.z1 * h));
  if (scaled <= 0.0) return 0;
  return std::min(static_cast<std::uint64_t>(scaled), n - 1);
}

std::vector<std::uint64_t> cell_counts(std::span<const double> points, const PartitionParams& params, int h) {
  validate(params);
  check_depth(params, h);
  validate_points(points);
  std::vector<std::uint64_t> counts(params.cells(h), 0);
  for (double x : points) ++counts[cell_index(x, params, h)];
  return counts;
}

double s_h_statistic(std::span<const double> points, const PartitionParams& params, int h) {
  check_depth(params, h);
  const std::vector<std::uint64_t> fine = cell_counts(points, params, params.p);
  return s_from_counts(fine, coarsen(fine, params, params.p, h), params, h);
}

TelescopingReport telescoping_check(std::span<const double> points, const PartitionParams& params) {
  const auto counts = all_counts(points, params);
  const auto& fine = counts.back();
  TelescopingReport r;
  for (int h = 0; h <= params.p; ++h) r.s.push_back(s_from_counts(fine, counts[static_cast<std::size_t>(h)], params, h));
  r.last_is_zero = r.s.back() == 0.0;
  r.differences_nonnegative = true;
  double sum = 0.0;
  for (int h = 0; h < params.p; ++h) {
    const double diff = r.s[static_cast<std::size_t>(h)] - r.s[static_cast<std::size_t>(h) + 1];
    const auto& parent = counts[static_cast<std::size_t>(h)];
    const auto& child = counts[static_cast<std::size_t>(h) + 1];
    double closed = 0.0;
    for (std::size_t i = 0; i < child.size(); ++i) {
      const double d =
          static_cast<double>(child[i]) - std::ldexp(static_cast<double>(parent[i >> params.z1]), -params.z1);
      closed += d * d;
    }
    closed = std::ldexp(closed, -params.z1 * (params.p - h - 1));
    r.differences.push_back(diff);
    r.closed_forms.push_back(closed);
    if (diff < -1e-12) r.differences_nonnegative = false;
    r.closed_form_error = std::max(r.closed_form_error, std::abs(diff - closed) / std::max(std::abs(closed), 1.0));
    sum += diff;
  }
  r.identity_error = std::abs(r.s.front() - sum) / std::max(r.s.front(), 1.0);
  return r;
}

CellBalance is_balanced(std::span<const double> points, double delta, const PartitionParams& params,
                        std::span<const int> cell_path) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  validate(params);
  const int h = static_cast<int>(cell_path.size());
  if (h >= params.p) throw Error(ErrorCode::InvalidArgument, "cell path must be shorter than p");
  std::uint64_t index = 0;
  for (int digit : cell_path) {
    if (digit < 0 || static_cast<std::uint64_t>(digit) >= params.z())
      throw Error(ErrorCode::InvalidArgument, "cell digit out of range");
    index = (index << params.z1) + static_cast<std::uint64_t>(digit);
  }
  const auto children = cell_counts(points, params, h + 1);
  const auto parent = coarsen(children, params, h + 1, h);
  return balance_from_counts(parent, children, h, index, points.size(), delta, params);
}

AntiCrowding anti_crowded(std::span<const double> points, double A, double M1) {
  validate_points(points);
  const double M = static_cast<double>(points.size());
  if (!(A >= 2.0)) throw Error(ErrorCode::InvalidArgument, "A must be at least 2");
  if (!(M1 > 1.0 && M1 <= M)) throw Error(ErrorCode::InvalidArgument, "M1 must satisfy 1 < M1 <= M");
  const std::vector<double> x = sorted_copy(points);
  const double min_len = 1.0 / M1;
  const double AM = A * M;
  AntiCrowding out;
  auto report = [&](std::size_t i, std::size_t j, double len, bool ends_at_point) {
    out.anti_crowded = false;
    out.lo = x[i];
    out.hi = ends_at_point ? x[j] : x[i] + len;
    if (out.hi > 1.0) {
      out.hi = 1.0;
      out.lo = 1.0 - len;
    }
    out.count = j - i + 1;
    out.allowed = AM * len;
  };
  // Windows shorter than 1/M1 are measured as 1/M1: the fullest such window
  // from each point decides.
  for (std::size_t i = 0, j = 0; i < x.size(); ++i) {
    j = std::max(j, i);
    while (j + 1 < x.size() && x[j + 1] - x[i] < min_len) ++j;
    if (static_cast<double>(j - i + 1) > AM * min_len) {
      report(i, j, min_len, false);
      return out;
    }
  }
  // Longer windows [x_i, x_j] violate when j + 1 - AM x_j > i - AM x_i, so
  // compare against the running minimum of i - AM x_i over eligible i.
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t j = 0, i = 0; j < x.size(); ++j) {
    for (; i <= j && x[j] - x[i] >= min_len; ++i) {
      const double g = static_cast<double>(i) - AM * x[i];
      if (g < best) {
        best = g;
        arg = i;
      }
    }
    if (arg < i && static_cast<double>(j + 1) - AM * x[j] > best) {
      const double span = x[j] - x[arg];
      if (static_cast<double>(j - arg + 1) > AM * span) {
        report(arg, j, span, true);
        return out;
      }
    }
  }
  return out;
}

double crowding_constant(std::span<const double> points, double M1) {
  validate_points(points);
  if (points.empty()) return 0.0;
  const double M = static_cast<double>(points.size());
  if (!(M1 > 0.0)) throw Error(ErrorCode::InvalidArgument, "M1 must be positive");
  const std::vector<double> x = sorted_copy(points);
  const double min_len = 1.0 / M1;
  double best = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i; j < x.size(); ++j)
      best = std::max(best, static_cast<double>(j - i + 1) / (M * std::max(x[j] - x[i], min_len)));
  return best;
}

double shifted_s_h(std::span<const double> points, double tau, const PartitionParams& params, int h) {
  std::vector<double> y(points.begin(), points.end());
  validate_points(y);
  for (double& v : y) {
    v += tau;
    v -= std::floor(v);
    if (v >= 1.0) v = 0.0;
  }
  return s_h_statistic(y, params, h);
}

double integral_s0(std::span<const double> points, const PartitionParams& params, std::uint64_t n, double upper) {
  validate(params);
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least one node");
  if (!(upper > 0.0 && upper <= 1.0)) throw Error(ErrorCode::InvalidArgument, "upper limit must lie in (0, 1]");
  const double step = upper / static_cast<double>(n);
  std::vector<double> values(n);
  parallel_for(n, [&](std::size_t j) { values[j] = shifted_s0(points, (static_cast<double>(j) + 0.5) * step, params); });
  double total = 0.0;
  for (double v : values) total += v;
  return total * step;
}

double exact_integral_s0(std::span<const double> points, const PartitionParams& params) {
  validate(params);
  validate_points(points);
  // The shifted statistic has period z^-p and jumps only where a translated
  // point meets a cell boundary.
  const double period = std::ldexp(1.0, -params.z1 * params.p);
  std::vector<double> cuts{0.0, period};
  for (double x : points) {
    const double r = std::fmod(x, period);
    cuts.push_back(r == 0.0 ? 0.0 : period - r);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double w = cuts[i + 1] - cuts[i];
    if (w <= 0.0) continue;
    total += w * shifted_s0(points, 0.5 * (cuts[i] + cuts[i + 1]), params);
  }
  return total * static_cast<double>(params.cells(params.p));
}

IntervalUnion covered_at_least(const std::vector<IntervalUnion>& sets, std::size_t min_count) {
  const double period = sets.empty() ? kTwoPi : sets.front().period();
  for (const IntervalUnion& u : sets)
    if (u.period() != period) throw Error(ErrorCode::InvalidArgument, "interval unions have different periods");
  if (min_count == 0) return IntervalUnion::full(period);
  if (min_count > sets.size()) return IntervalUnion(period);
  // Openings sort before closings at the same point, so touching closed arcs join.
  std::vector<std::pair<double, int>> events;
  for (const IntervalUnion& u : sets)
    for (const auto& iv : u.intervals()) {
      events.emplace_back(iv.lo, -1);
      events.emplace_back(iv.hi, +1);
    }
  std::sort(events.begin(), events.end());
  std::vector<std::pair<double, double>> arcs;
  std::size_t depth = 0;
  double open_at = 0.0;
  for (const auto& [x, kind] : events) {
    if (kind < 0) {
      if (++depth == min_count) open_at = x;
    } else {
      if (depth-- == min_count) arcs.emplace_back(open_at, x);
    }
  }
  return IntervalUnion::from_arcs(arcs, period);
}

std::size_t ceil_count(double x) {
  if (x <= 0.0) return 0;
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-12 * std::max(1.0, r)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

IntervalUnion majority_set(const std::vector<IntervalUnion>& sets, double eta) {
  if (!(eta > 0.0 && eta < 1.0)) throw Error(ErrorCode::InvalidArgument, "eta must lie in (0, 1)");
  if (sets.empty()) throw Error(ErrorCode::InvalidArgument, "majority of an empty family");
  const double k = static_cast<double>(sets.size());
  IntervalUnion out = covered_at_least(sets, ceil_count(eta * k));
  const double period = sets.front().period();
  double worst_gap = 0.0;
  for (const IntervalUnion& u : sets) worst_gap = std::max(worst_gap, period - u.measure());
  const double bound = period - worst_gap - period * eta;
  if (out.measure() < bound - 1e-9 * period) throw std::logic_error("majority set below its measure bound");
  return out;
}

GoodDirections good_directions(const TranslationSurface& surface, double N, double epsilon,
                               const GoodDirectionOptions& options) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0, 1)");
  if (!(N >= 1.0)) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
  if (options.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (options.z1 < 1) throw Error(ErrorCode::InvalidArgument, "z1 must be at least 1");
  GoodDirections g;
  g.epsilon = epsilon;
  g.eta = epsilon / 2.0;
  g.n1 = std::log2(N);
  g.k = options.k;
  g.z1 = options.z1;
  const double top_scale = g.n1 + static_cast<double>(g.k) * g.z1;
  const int top = std::max(1, static_cast<int>(std::floor(top_scale)));
  g.enumeration_T = std::ldexp(1.0, top);
  const DirectionSet set = direction_set(surface, g.enumeration_T, options.saddle);
  g.c_star = options.c_star > 0.0 ? options.c_star : fit_counting_constant(set).c_star;
  g.c0 = options.c0 ? *options.c0 : std::max(4.0, 16.0 * g.c_star / (std::numbers::pi * epsilon));

  std::vector<IntervalUnion> good(static_cast<std::size_t>(g.k) + 1);
  parallel_for(good.size(), [&](std::size_t i) {
    good[i] = omega_set(set, g.n1 + static_cast<double>(i) * g.z1, g.c0).complement();
  });
  for (const IntervalUnion& u : good) g.omega_measures.push_back(kTwoPi - u.measure());

  const std::vector<IntervalUnion> counted(good.begin(), good.begin() + std::max(0, g.k - 1));
  const IntervalUnion majority = covered_at_least(counted, ceil_count(g.eta * g.k));
  g.set = majority.intersect(good.back());
  g.target = (1.0 - epsilon) * kTwoPi;
  g.meets_target = g.set.measure() >= g.target;
  return g;
}

BalanceReport balance_report(std::span<const double> points, const PartitionParams& params, double delta, double A,
                             double M1) {
  validate(params);
  validate_points(points);
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  BalanceReport r;
  r.params = params;
  r.M = points.size();
  r.delta = delta;
  r.counts = all_counts(points, params);
  r.telescoping = telescoping_check(points, params);
  for (int h = 0; h < params.p; ++h) {
    const auto& parent = r.counts[static_cast<std::size_t>(h)];
    const auto& child = r.counts[static_cast<std::size_t>(h) + 1];
    for (std::uint64_t i = 0; i < parent.size(); ++i)
      r.cells.push_back(balance_from_counts(parent, child, h, i, r.M, delta, params));
  }
  if (A > 0.0 && M1 > 0.0) {
    r.A = A;
    r.M1 = M1;
    r.anti_crowding = anti_crowded(points, A, M1);
  }
  return r;
}

std::string balance_report_to_json(const BalanceReport& r) {
  nlohmann::json j;
  j["z"] = r.params.z();
  j["p"] = r.params.p;
  j["M"] = r.M;
  j["delta"] = r.delta;
  j["counts"] = r.counts;
  j["S"] = r.telescoping.s;
  j["telescoping"] = {{"differences", r.telescoping.differences},
                      {"closed_forms", r.telescoping.closed_forms},
                      {"identity_error", r.telescoping.identity_error},
                      {"closed_form_error", r.telescoping.closed_form_error},
                      {"passed", r.telescoping.passed()}};
  nlohmann::json cells = nlohmann::json::array();
  for (const CellBalance& c : r.cells)
    cells.push_back({{"depth", c.depth},
                     {"index", c.index},
                     {"count", c.count},
                     {"children", c.child_counts},
                     {"worst_deviation", c.worst_deviation},
                     {"allowance", c.allowance},
                     {"balanced", c.balanced}});
  j["cells"] = std::move(cells);
  if (r.anti_crowding) {
    const AntiCrowding& a = *r.anti_crowding;
    nlohmann::json ac{{"A", r.A}, {"M1", r.M1}, {"anti_crowded", a.anti_crowded}};
    if (!a.anti_crowded) ac["witness"] = {{"lo", a.lo}, {"hi", a.hi}, {"count", a.count}, {"allowed", a.allowed}};
    j["anti_crowding"] = std::move(ac);
  }
  return j.dump(2) + "\n";
}

}  // namespace flatflow
