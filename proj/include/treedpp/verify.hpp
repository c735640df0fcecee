#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "treedpp/kernels.hpp"
#include "treedpp/lift.hpp"
#include "treedpp/projection.hpp"
#include "treedpp/quadrature.hpp"

namespace treedpp {

// Numerical error sources are kept on separate lines; pass means
// |lhs - rhs| <= quadrature + truncation + monteCarlo.
struct ErrorBudget {
  double quadrature = 0.0;   // estimated error of the quadrature side
  double truncation = 0.0;   // allowance for the finite rank / window cut
  double monteCarlo = 0.0;   // 3 standard errors of the sampled side
  double total() const { return quadrature + truncation + monteCarlo; }
};

struct VerificationReport {
  std::string name;
  double lhs = 0.0, lhsError = 0.0;
  double rhs = 0.0, rhsError = 0.0;
  ErrorBudget budget;
  bool pass = false;

  std::string kernel;
  int level = 0;
  int rankMax = 0;
  std::string window;
  std::uint64_t seed = 0;
  std::size_t draws = 0;
  nlohmann::json details = nlohmann::json::object();

  double gap() const { return std::abs(lhs - rhs); }
  void decide() { pass = gap() <= budget.total(); }
};

nlohmann::json toJson(const VerificationReport& r);
VerificationReport reportFromJson(const nlohmann::json& j);

struct CorrelationOptions {
  int rankMax = 4;
  Window window;
  QuadratureOptions quadrature;
  ProjectionOptions projection;
  double tolerance = 1e-10;  // truncation allowance
};

// lhs = int_{A_1 x ... x A_m} det[K(x_p, x_q)] dm^m by quadrature,
// rhs = sum over i in I_l(A_1) x ... x I_l(A_m) of det[K_F(i_p, i_q)].
// Cells must be cells of Delta(level); m <= 3.
VerificationReport correlationIdentity(const ContinuousKernel& kernel, int level,
                                       const std::vector<CellKey>& cells, const CorrelationOptions& options);

// Same, reusing an existing representation (its basis and projected kernel).
VerificationReport correlationIdentity(const ContinuousKernel& kernel, const TreeRepresentation& rep,
                                       const std::vector<CellKey>& cells, const QuadratureOptions& quadrature,
                                       double tolerance);

// int_A f_{l,i} conj(f_{l,j}) dm, exactly; A must be a cell of Delta(level).
double orthogonalityIntegral(int level, const TreeIndex& i, const TreeIndex& j, const CellKey& a,
                             const ReferenceMeasure& measure);

// All (i, j, A) with i, j of rank <= rankMax and A a level-l cell of the
// window; the expected value is 1 iff i = j and B_i lies in A.
struct OrthogonalitySweep {
  std::size_t triples = 0;
  std::size_t mismatches = 0;
  double maxError = 0.0;
};
OrthogonalitySweep orthogonalitySweep(int level, int rankMax, const Window& window,
                                      const ReferenceMeasure& measure);
VerificationReport orthogonalityReport(int level, int rankMax, const Window& window,
                                       const ReferenceMeasure& measure);

struct MomentOptions {
  int rankMax = 4;
  Window window;
  std::size_t draws = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
  QuadratureOptions quadrature;
  ProjectionOptions projection;
};

// Empirical E[prod s(A_i)! / (s(A_i) - k_i)!] over lifted samples against the
// quadrature of rho^m over A_1^{k_1} x ... (m = sum k_i <= 3). Cells must be
// disjoint cells of level <= l.
VerificationReport factorialMomentCheck(const ContinuousKernel& kernel, int level,
                                        const std::vector<CellKey>& cells, const std::vector<int>& multiplicity,
                                        const MomentOptions& options);

// Level-l counts recomputed from level-l' counts through the nesting map on
// each configuration; returns the number of mismatching configurations.
std::size_t refinementCheck(int level, int otherLevel, const Window& window, const ReferenceMeasure& measure,
                            const std::vector<PointConfiguration>& configurations);

// The consistency experiment passes when the two-sample chi-square p-value
// exceeds the threshold and, where the exact law is available, every outcome
// frequency of both samples lies within 3 sd of it.
inline constexpr double kConsistencyPValueThreshold = 1e-3;
bool consistencyPasses(const ConsistencyReport& r);
nlohmann::json toJson(const ConsistencyReport& r);
// Outcome frequency table (header line plus one row per outcome).
std::string outcomeTableCsv(const ConsistencyReport& r);

// Points drawn from m restricted to the window box.
PointConfiguration randomConfiguration(const Window& window, const ReferenceMeasure& measure,
                                       std::size_t points, Pcg32& rng);

}  // namespace treedpp
