#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "decigibbs/decimation.hpp"
#include "decigibbs/lattice.hpp"
#include "decigibbs/spec_engine.hpp"

namespace decigibbs {

// Real-valued function on the subsets of a ground set, indexed by bitmask.
struct SetFunction {
  std::vector<Site> ground;    // <= 20 sites, lexicographic
  std::vector<double> values;  // 2^|ground|, values[0] == 0
};

constexpr int kMoebiusCap = 20;

// Phi_A = sum_{B subset A} (-1)^{|A\B|} H_B, for every A at once.
SetFunction moebius_invert(const SetFunction& H);
// Inverse direction: H_A = sum_{B subset A} Phi_B.
SetFunction moebius_accumulate(const SetFunction& phi);

// A value together with its propagated standard error (0 for exact sources).
struct Measured {
  double value = 0.0;
  double stderr_ = 0.0;
  bool indeterminate = false;
};

// Provider of log gamma_B(config | +) for finite volumes B.
class KernelSource {
 public:
  virtual ~KernelSource() = default;
  // config bit k refers to the k-th site of the (lex-sorted) volume.
  virtual Measured log_prob_plus(const std::vector<Site>& volume,
                                 Config config) = 0;
};

// Nearest-neighbor Ising specification, exact enumeration, log Z cached per
// translated volume shape.
class IsingExactSource : public KernelSource {
 public:
  explicit IsingExactSource(const IsingParams& p) : params_(p) {}
  Measured log_prob_plus(const std::vector<Site>& volume, Config config) override;

 private:
  IsingParams params_;
  std::mutex mu_;
  std::unordered_map<std::string, double> log_z_;
};

// Decimated kernels on a finite window, exact by enumeration; desk scale
// only (free sites of the window must stay under the enumeration cap).
class ExactDecimatedSource : public KernelSource {
 public:
  ExactDecimatedSource(const IsingParams& p, BoundaryKind bc,
                       int window_half_width)
      : params_(p), bc_(bc), window_(window_half_width) {}
  Measured log_prob_plus(const std::vector<Site>& volume, Config config) override;

 private:
  IsingParams params_;
  BoundaryKind bc_;
  int window_;
  std::mutex mu_;
  std::unordered_map<std::string, std::vector<double>> tables_;
};

// Decimated kernels estimated by sampling; carries Wilson-interval errors
// through the logarithm.
class EstimatedDecimatedSource : public KernelSource {
 public:
  EstimatedDecimatedSource(const IsingParams& p, BoundaryKind bc,
                           int window_half_width, const McBudget& mc)
      : params_(p), bc_(bc), window_(window_half_width), mc_(mc) {}
  Measured log_prob_plus(const std::vector<Site>& volume, Config config) override;

 private:
  IsingParams params_;
  BoundaryKind bc_;
  int window_;
  McBudget mc_;
  std::mutex mu_;
  std::unordered_map<std::string, DecimatedKernelEstimate> tables_;
};

constexpr int kVacuumCap = 12;

// Vacuum potential term: Phi+_A(sigma) =
//   - sum_{B subset A} (-1)^{|A\B|} [log gamma_B(sigma|+) - log gamma_B(+|+)].
// sigma is a bitmask over the lex-sorted A.
Measured vacuum_potential(const std::vector<Site>& A, Config sigma,
                          KernelSource& source);

// -log gamma_Lambda(sigma|+)/gamma_Lambda(+|+).
Measured free_hamiltonian(const std::vector<Site>& lambda, Config sigma,
                          KernelSource& source);

// Telescoped potential term on L_{i,m} for a configuration omega given as a
// site lookup (+1/-1 anywhere the formulas touch). m=0 uses the single-site
// ratio, m>=1 the four-kernel cross ratio on L_{i,m}.
Measured telescoped_term(const Site& i, int m,
                         const std::function<Spin(const Site&)>& omega,
                         KernelSource& source);

// Sum of telescoped terms anchored in lambda (m = 0..mmax) for the
// configuration sigma_lambda extended by + outside; equals the free-b.c.
// Hamiltonian for finite-range sources once mmax covers the range.
Measured telescoped_sum(const Volume& lambda, Config sigma, int mmax,
                        KernelSource& source);

// Finite-window Monte Carlo evaluation of the telescoped term via
// constrained-measure expectations of spin-flip reweighting factors.
// Summands whose constraint carries +1 at the anchor or the annulus site
// vanish identically and are skipped as exact zeros.
struct McTermBreakdown {
  int annulus_size = 0;
  int evaluated_summands = 0;  // those not exactly zero
  int near_summands = 0;       // annulus sites within L1 distance 4
};

Measured telescoped_term_mc(const Site& i, int m,
                            const std::function<Spin(const Site&)>& image,
                            const IsingParams& params, BoundaryKind bc,
                            int window_half_width, const McBudget& mc,
                            McTermBreakdown* breakdown = nullptr);

// inf over boundaries of the single-site kernel's probability of its own
// spin; the non-nullness constant entering the uniform potential bound.
double single_site_nonnullness(const IsingParams& params);

struct QcdPoint {
  int m = 0;
  double abs_psi = 0.0;
  double stderr_ = 0.0;
};

struct QCDFit {
  double c1 = 0.0;
  double c2 = 0.0;
  double lambda = 0.0;
  double lambda_se = 0.0;
  int quenched_length = 0;
  int n_fit_points = 0;
  bool accepted = false;  // lambda > 0
};

// Least squares of log(|Psi|/m) against m on points beyond the quenched
// length; C1 is the max of |Psi|/m at or below it. Points with |Psi| = 0
// beyond the length are unusable; fewer than 4 usable points throws.
QCDFit qcd_fit(const std::vector<QcdPoint>& terms, int quenched_length);

}  // namespace decigibbs
