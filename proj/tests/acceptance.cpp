// Acceptance gate: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cvpctc/encode.hpp"
#include "cvpctc/gaussian.hpp"
#include "cvpctc/pctc.hpp"
#include "cvpctc/rng.hpp"
#include "cvpctc/teleport.hpp"
#include "oracles.hpp"

using namespace cvpctc;

namespace {

struct Verdict {
  bool ok = true;
  std::ostringstream detail;

  void check(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << " [" << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<void(Verdict&)>& body) {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.check(false, std::string("exception: ") + e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0) {
    std::ostringstream os;
    os << "runtime " << elapsed << " s exceeds " << limit_s << " s";
    v.check(elapsed < limit_s, os.str());
  }
  if (!v.ok) ++failures;
  std::printf("%s criterion %d: %s (%.3f s)%s\n", v.ok ? "PASS" : "FAIL", id, title.c_str(), elapsed,
              v.detail.str().c_str());
}

double noise(double r) { return 2.0 * std::exp(-2.0 * r) / 4.0; }

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

GaussianState random_state(std::mt19937_64& rng, std::size_t n, bool pure) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto dim = static_cast<Eigen::Index>(2 * n);
  Matrix cov = Matrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; i += 2) {
    const double nu = pure ? 0.25 : 0.25 * (1.0 + 2.0 * std::abs(u(rng)));
    cov(i, i) = nu;
    cov(i + 1, i + 1) = nu;
  }
  GaussianState s(Vector::Zero(dim), cov);
  for (std::size_t m = 0; m < n; ++m) {
    s = apply(s, squeeze_op(m, 0.8 * u(rng), Quadrature::X));
    s = apply(s, phase_rotation_op(m, 3.0 * u(rng)));
    s = displace_p(displace_x(s, m, 2 * u(rng)), m, 2 * u(rng));
  }
  for (std::size_t m = 0; m + 1 < n; ++m) s = apply(s, beam_splitter_op(m, m + 1, 0.5 * (1 + u(rng))));
  return s;
}

std::vector<std::size_t> random_halting_table(std::mt19937_64& rng, std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t state = order[i];
    t[state] = (i + 1 == n || rng() % 4 == 0) ? state : order[i + 1 + rng() % (n - i - 1)];
  }
  return t;
}

std::string word_of(std::size_t k, std::size_t width) {
  std::string s;
  for (std::size_t b = width; b-- > 0;) s += ((k >> b) & 1) ? '1' : '0';
  return s;
}

}  // namespace

int main() {
  criterion(1, "EPR correlations Var(x_A - x_B) = Var(p_A + p_B) = 2 e^{-2r}/4", 5.0, [](Verdict& v) {
    for (double r : {0.0, 0.5, 1.0, 2.0}) {
      const auto e = make_epr(r);
      const auto& c = e.cov();
      const double vx = c(0, 0) + c(2, 2) - 2 * c(0, 2);
      const double vp = c(1, 1) + c(3, 3) + 2 * c(1, 3);
      v.check(std::abs(vx - noise(r)) <= 1e-10, "analytic x, r=" + num(r));
      v.check(std::abs(vp - noise(r)) <= 1e-10, "analytic p, r=" + num(r));

      // Shot level: sequential homodyne of both halves gives joint samples.
      Rng rng(derive_seed(100, static_cast<std::uint64_t>(r * 10)));
      std::vector<double> dx;
      std::vector<double> sp;
      for (int i = 0; i < 10000; ++i) {
        const auto ax = homodyne(e, 0, Quadrature::X, std::nullopt, rng);
        const auto bx = homodyne(*ax.remaining, 0, Quadrature::X, std::nullopt, rng);
        dx.push_back(ax.record.outcome - bx.record.outcome);
        const auto ap = homodyne(e, 0, Quadrature::P, std::nullopt, rng);
        const auto bp = homodyne(*ap.remaining, 0, Quadrature::P, std::nullopt, rng);
        sp.push_back(ap.record.outcome + bp.record.outcome);
      }
      const auto mx = oracle::moments(dx);
      const auto mp = oracle::moments(sp);
      v.check(std::abs(mx.variance - noise(r)) < 3 * mx.stderr_variance(), "shot x, r=" + num(r));
      v.check(std::abs(mp.variance - noise(r)) < 3 * mp.stderr_variance(), "shot p, r=" + num(r));
    }
  });

  criterion(2, "unit-gain teleportation: mean preserved, added noise 2 e^{-2r}/4, F = 1/(1+e^{-2r})", 5.0,
            [](Verdict& v) {
              const auto in = coherent(0.8, -1.3);
              for (double r : {0.0, 0.25, 0.5, 1.0, 1.5, 2.5}) {
                const auto out = teleport_ensemble(in, r, 1.0, 1.0);
                v.check((out.mean() - in.mean()).cwiseAbs().maxCoeff() == 0.0, "mean, r=" + num(r));
                const Matrix added = out.cov() - in.cov();
                v.check((added - noise(r) * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10,
                        "added covariance, r=" + num(r));
                const double ref = oracle::wigner_overlap(in.mean(), in.cov(), out.mean(), out.cov());
                const double closed = 1.0 / (1.0 + std::exp(-2.0 * r));
                const double f = fidelity_pure(in, out);
                v.check(std::abs(f - ref) <= 1e-4, "oracle fidelity, r=" + num(r));
                v.check(std::abs(closed - ref) <= 1e-4, "closed form vs oracle, r=" + num(r));
              }
            });

  criterion(3, "post-selected teleportation at r = 6: F >= 0.99 with no Bob displacement", 1.0, [](Verdict& v) {
    for (const auto& [x, p] : std::vector<std::pair<double, double>>{{0, 0}, {1, -0.5}, {3, 2}}) {
      const auto in = coherent(x, p);
      const auto res = teleport_postselected(in, 6.0);
      v.check(res.config.g_x == 0.0 && res.config.g_p == 0.0, "gain not zero");
      v.check(res.x_u.outcome == 0.0 && res.p_v.outcome == 0.0, "outcomes not forced to zero");
      const double f = fidelity_pure(in, res.output);
      const double ref = oracle::wigner_overlap(in.mean(), in.cov(), res.output.mode_mean(0), res.output.mode_cov(0));
      v.check(f >= 0.99 && ref >= 0.99, "fidelity " + num(f));
    }
  });

  criterion(4, "QND gate reproduces all four input-output lines and is symplectic", 0.0, [](Verdict& v) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-10, 10);
    for (double g : {-2.0, 0.5, 1.0, 3.0}) {
      const Matrix s = qnd_op(0, 1, g).matrix();
      const Matrix om = symplectic_form(2);
      v.check((s * om * s.transpose() - om).cwiseAbs().maxCoeff() <= 1e-12, "S Omega S^T, G=" + num(g));
      for (int i = 0; i < 100; ++i) {
        const double x1 = u(rng), p1 = u(rng), x2 = u(rng), p2 = u(rng);
        GaussianState st = displace_p(displace_x(displace_p(displace_x(vacuum(2), 0, x1), 0, p1), 1, x2), 1, p2);
        st = apply(st, qnd_op(0, 1, g));
        const auto& m = st.mean();
        v.check(m(0) == x1, "x1 line");
        v.check(std::abs(m(2) - (x2 + g * x1)) <= 1e-12 * (1 + std::abs(x2 + g * x1)), "x2 line");
        v.check(std::abs(m(1) - (p1 - g * p2)) <= 1e-12 * (1 + std::abs(p1 - g * p2)), "p1 line");
        v.check(m(3) == p2, "p2 line");
      }
    }
  });

  criterion(5, "QND difference readout: unbiased mean and oracle variance", 30.0, [](Verdict& v) {
    const IntervalScheme scheme(0.0, 16.0, 16);
    std::vector<std::size_t> table(16);
    for (std::size_t k = 0; k < 16; ++k) table[k] = std::min<std::size_t>(k + 4, 15);
    const TransitionFunction f(table, {});
    const auto word = InputWord::bits("0010");
    for (double g : {0.5, 1.0, 2.0}) {
      const auto rep = run_qnd_scheme(scheme, f, word, 1.0, g, 10000, 11);
      const auto& q = *rep.qnd;
      const double expected = g * (q.x_in_midpoint - q.x_out_midpoint);
      const double se = std::sqrt(q.delta_variance / 10000.0);
      v.check(std::abs(q.mean_delta - expected) < 3 * se, "mean, G=" + num(g));
    }
    for (double r : {0.0, 1.0, 2.0}) {
      const auto rep = run_qnd_scheme(scheme, f, word, r, 1.0, 100000, 12);
      // Hand propagation: four x-squeezed modes; x_anc1 - x_anc2 picks up G x_in - G x_out.
      const double e = std::exp(-2 * r) / 4;
      const double ref = 2 * e + 2 * 1.0 * e;
      v.check(std::abs(rep.qnd->delta_variance / ref - 1.0) <= 0.05,
              "variance " + num(rep.qnd->delta_variance) + " vs " + num(ref) + ", r=" + num(r));
    }
  });

  criterion(6, "interval encoding round trip, '1100' -> 12, strict interval bounds", 0.0, [](Verdict& v) {
    for (std::size_t n : {2u, 16u, 256u}) {
      const IntervalScheme s(0.0, 16.0, n);
      for (std::size_t k = 0; k < n; ++k) {
        const double e = encode(s, k);
        v.check(decode(s, s.x0() + e).index == k, "roundtrip n=" + std::to_string(n));
        v.check(e > static_cast<double>(k) * s.alpha() && e < static_cast<double>(k + 1) * s.alpha(),
                "bounds n=" + std::to_string(n));
      }
    }
    v.check(index_of(InputWord::bits("1100")) == 12, "1100");
  });

  criterion(7, "end-to-end schemes on 10 halting tables, n = 16", 0.0, [](Verdict& v) {
    const IntervalScheme scheme(0.0, 16.0, 16);
    std::mt19937_64 rng(7);
    std::size_t loop_ok = 0;
    std::size_t loop_total = 0;
    std::size_t shot_hits = 0;
    std::size_t shot_total = 0;
    std::size_t majority_ok = 0;
    for (int t = 0; t < 10; ++t) {
      const auto table = random_halting_table(rng, 16);
      const TransitionFunction f(table, {});
      for (std::size_t k = 0; k < 16; ++k) {
        const auto word = InputWord::bits(word_of(k, 4));
        const std::size_t truth = oracle::brute_fixed_point(table, k);
        const auto lr = run_loop_scheme(scheme, f, word, 6.0, 1);
        ++loop_total;
        if (lr.consistent && lr.decoded_index == truth) ++loop_ok;
        const auto qr = run_qnd_scheme(scheme, f, word, 2.0, 1.0, 200, derive_seed(70, t * 16 + k));
        shot_hits += static_cast<std::size_t>(std::lround(qr.qnd->success_rate * 200));
        shot_total += 200;
        if (qr.decoded_index == truth) ++majority_ok;
      }
    }
    v.check(loop_ok == loop_total, "loop " + std::to_string(loop_ok) + "/" + std::to_string(loop_total));
    const double rate = static_cast<double>(shot_hits) / static_cast<double>(shot_total);
    v.check(rate >= 0.99, "qnd shot success " + num(rate));
    v.check(majority_ok == loop_total, "qnd majority " + std::to_string(majority_ok));
  });

  criterion(8, "property suite: symplecticity, uncertainty, oracle fidelity, conditioning consistency", 0.0,
            [](Verdict& v) {
              std::mt19937_64 rng(8);
              std::uniform_real_distribution<double> u(-2, 2);
              std::uniform_real_distribution<double> t(0, 1);
              for (int i = 0; i < 100; ++i) {
                const std::vector<SymplecticOp> ops{squeeze_op(0, u(rng), Quadrature::X), phase_rotation_op(1, u(rng)),
                                                    beam_splitter_op(0, 1, t(rng)), two_mode_squeeze_op(0, 1, u(rng)),
                                                    qnd_op(0, 1, u(rng))};
                GaussianState s = random_state(rng, 2, false);
                for (const auto& op : ops) {
                  v.check(symplectic_residual(op.matrix()) < 1e-10, "symplectic");
                  s = apply(s, op);
                  v.check(s.symplectic_eigenvalues().front() >= 0.25 - 1e-9, "uncertainty");
                }
              }
              for (int i = 0; i < 20; ++i) {
                const auto a = random_state(rng, 1, true);
                const auto b = random_state(rng, 1, false);
                const double ref = oracle::wigner_overlap(a.mean(), a.cov(), b.mean(), b.cov());
                v.check(std::abs(fidelity_pure(a, b) - ref) <= 1e-4, "fidelity oracle");
              }
              for (int i = 0; i < 20; ++i) {
                const auto s = random_state(rng, 3, false);
                const double m = u(rng);
                const auto h = homodyne(s, 1, Quadrature::X, m);
                oracle::Mat f = oracle::Mat::Zero(1, 6);
                f(0, 2) = 1;
                oracle::Mat target = oracle::Mat::Zero(4, 6);
                target(0, 0) = target(1, 1) = target(2, 4) = target(3, 5) = 1;
                const auto ref = oracle::condition(s.mean(), s.cov(), target, f, oracle::Vec::Constant(1, m));
                v.check((h.remaining->mean() - ref.mean).cwiseAbs().maxCoeff() <= 1e-9, "conditioned mean");
                v.check((h.remaining->cov() - ref.cov).cwiseAbs().maxCoeff() <= 1e-9, "conditioned covariance");
              }
            });

  return failures == 0 ? 0 : 1;
}
