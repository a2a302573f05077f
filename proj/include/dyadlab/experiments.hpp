#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dyadlab/haar.hpp"
#include "dyadlab/norms.hpp"
#include "dyadlab/open_set.hpp"
#include "dyadlab/operators.hpp"
#include "dyadlab/scalar.hpp"

namespace dyadlab {

// ---------------------------------------------------------------------------
// Random symbols.

enum class GeneratorKind { General, ScaleSkipping, RectangleLocalized };
enum class CoefficientLaw { RationalGrid, Gaussian };

GeneratorKind parseGeneratorKind(const std::string& s);
std::string toString(GeneratorKind k);

struct SymbolGenerator {
  GeneratorKind kind = GeneratorKind::General;
  int N = 3;
  CoefficientLaw law = CoefficientLaw::RationalGrid;
  long denominator = 64;  // rational grid k/denominator, |k| <= denominator
  double density = 1.0;   // probability that an eligible rectangle gets a coefficient

  // Rectangles the generator may populate (for rectangle-localized symbols this
  // depends on the drawn anchor, so it is only the global candidate set).
  std::vector<DyadicRectangle> eligible() const;

  template <class S>
  HaarExpansion<S> draw(std::mt19937_64& rng) const;
};

// Only (even, even) rectangles on which both shifts act.
bool isScaleSkippingRect(const DyadicRectangle& R, int N);
bool skipsScales(const HaarExpansion<double>& b);

// Deterministic per-trial seeds.
std::uint64_t trialSeed(std::uint64_t seed, int depth, int trial);

// ---------------------------------------------------------------------------
// Reports.

struct TrialRow {
  std::uint64_t seed = 0;
  int depth = 0;
  int trial = 0;
  double ratio = 0;
  double aux = 0;
  bool flagged = false;
  std::string label;    // part name, variant, etc.
  std::string witness;  // rectangle or run-length open set
};

struct ConstantReport {
  std::string name;
  std::uint64_t seed = 0;
  int trials = 0;
  std::vector<int> depths;
  std::vector<double> maxRatio;  // per depth, over unflagged trials
  std::vector<double> maxAux;
  std::vector<int> flagged;
  std::vector<TrialRow> rows;

  void summarize();
  // max over consecutive depths of maxRatio[k+1] / maxRatio[k]
  double growth() const;
  double auxGrowth() const;
};

// ---------------------------------------------------------------------------
// Exact algebra batteries.

struct IdentityCheck {
  IdentityCheck() = default;
  explicit IdentityCheck(std::string n) : name(std::move(n)) {}

  std::string name;
  long checks = 0;
  long failures = 0;
  std::string firstFailure;
  bool ok() const { return checks > 0 && failures == 0; }
  void record(bool pass, const std::string& what) {
    ++checks;
    if (!pass) {
      if (failures == 0) firstFailure = what;
      ++failures;
    }
  }
};

// T^b = nine parts + mean part, exactly, for all shift variants.
IdentityCheck verifyMasterIdentity(int trials, const std::vector<int>& depths, std::uint64_t seed);
// sum of the applicable tested operators equals T^b(h_I'' (x) h_J'') for every admissible pair.
IdentityCheck verifyTestedOperators(int trials, int N, std::uint64_t seed);
// P1 + ... + P5 = T^b(p (x) h_J''), P1 perp P2 for odd J'', P_even perp the rest for even J''.
IdentityCheck verifyPOperators(int trials, int N, std::uint64_t seed);
// T^2 = 0 and (T*)^2 = 0 in both variables and both parities.
IdentityCheck verifyShiftSquares(int N);

struct MainskipVanishing {
  IdentityCheck zz{"ZZ(alpha0, 1_U) = 0"};
  IdentityCheck piZ{"piZ lines 1-2 vanish"};
  IdentityCheck Zpi{"Zpi lines 1 and 3 vanish"};
  IdentityCheck orth{"pipi1 orthogonal to the other survivors"};
  IdentityCheck energy{"energy(U0) <= ||pipi1||^2"};
  bool ok() const { return zz.ok() && piZ.ok() && Zpi.ok() && orth.ok() && energy.ok(); }
};

MainskipVanishing verifyMainskipVanishing(int trials, int N, std::uint64_t seed);

// T^beta applied to rho vanishes when sigma(rho) lies in U0 and sigma(beta) avoids
// the rectangles inside U = enlarge(U0).
IdentityCheck verifyDeepAnnihilation(int trials, int N, std::uint64_t seed, bool star);

// Pairs (symbol rectangle R', input rectangle R'') with T^{h_R'} h_R'' != 0 must be nested:
// I' inside parent(I'') (starred shifts) or I' inside I'' (plain), likewise in y.
struct MonotonicityReport {
  bool star = false;
  long interacting = 0;
  long violations = 0;
  std::string firstViolation;
};
MonotonicityReport supportMonotonicity(int N, bool star);

// ---------------------------------------------------------------------------
// Theorem constants.

// ||b||_{BMO_r} / ||T^b|| (ratio) and the strengthened sum normalized by ||T^b||^2 (aux).
ConstantReport verifyBmoRecBound(int trials, const std::vector<int>& depths, std::uint64_t seed,
                                 const SymbolGenerator& gen = {});
// mainskip1 constant ||b||^2_ChF / ||T^b||^2 on scale-skipping symbols.
ConstantReport verifyMainskip(int trials, const std::vector<int>& depths, std::uint64_t seed);
// ||T^b|| / ||b||_ChF
ConstantReport verifyUpperBound(int trials, const std::vector<int>& depths, std::uint64_t seed,
                                const SymbolGenerator& gen = {});

using Signature = std::array<std::array<int, 3>, 2>;
Signature signatureClassifier(const std::string& partName);
int signatureOnes(const Signature& s);

// ||part|| / ||b||_{BMO_r} for the D-containing parts; row label = part name.
ConstantReport verifySingleOneParts(int trials, int N, std::uint64_t seed);

// max |U| / |U0| over random unions of dyadic rectangles, per depth.
ConstantReport enlargeRatios(int samples, const std::vector<int>& depths, std::uint64_t seed, long lambdaNum = 1,
                             long lambdaDen = 16);

// exact vs heuristic Chang-Fefferman norm at N = 2
struct ChFAgreement {
  int trials = 0;
  int mismatches = 0;
  int belowRect = 0;  // bmoChF < bmoRect (must never happen)
  double worstGap = 0;
};
ChFAgreement compareChF(int trials, std::uint64_t seed, int restarts = 10);

// ---------------------------------------------------------------------------
// Smallness.

struct SmallnessWitness {
  DyadicOpenSet U;
  DyadicRectangle R;
  double cR = 0, cR2 = 0;
  std::string valueR, valueR2;
};

struct SmallnessSearch {
  int N = 0;
  bool star = false;
  long setsTested = 0;
  long horizontalChecks = 0;
  long horizontalFailures = 0;
  std::string firstHorizontalFailure;
  long fullSquareNonzero = 0;  // coefficients on U = full square that are not zero
  std::optional<SmallnessWitness> vertical;
};

// Catalog: every single rectangle plus every union of two rectangles of level <= 2.
std::vector<DyadicOpenSet> smallnessCatalog(int N);
SmallnessSearch smallnessFalsifier(int N, bool star = false);

// ---------------------------------------------------------------------------
// Survivors of f = 1_U with alpha0.

enum class LineStatus { Zero, BmoBounded, Survivor };
std::string toString(LineStatus s);

struct LineAudit {
  Part part;
  int line;  // 0-based
  LineStatus status;
  double norm = 0;
  double ratio = 0;  // norm / ||alpha0||_{BMO_r} for D parts
};

struct SurvivorReport {
  std::vector<LineAudit> lines;
  bool matchesClaim = false;         // every non-D line outside the expected survivor set is zero
  bool allExpectedNonzero = false;   // every expected survivor is nonzero on this instance
  std::vector<std::string> survivors;
};

bool expectedSurvivor(Part p, int line);
SurvivorReport survivorAudit(const HaarExpansion<Surd>& b, const DyadicOpenSet& U0, bool star = false);
// first random (b, U0) at depth N on which piZ3 survives; with lambda = 1/16 this needs N >= 6
struct SurvivorInstance {
  HaarExpansion<Surd> b;
  DyadicOpenSet U0;
  SurvivorReport report;
  int attempts = 0;
};
std::optional<SurvivorInstance> findSurvivorInstance(int N, std::uint64_t seed, int maxAttempts = 1000);

// x_{K,L} = coefficients of the pi-pi part of alpha0 applied to 1_U.
// ratio: sum over K^ x L^ in U of (b, h_{K^ x L^})^2 / (||pipi||^2 |U|)  (converse direction)
// aux:   sum over K^ x L^ in U of x_{K,L}^2 / (||pipi||^2 |U|)            (always <= 1)
ConstantReport measureXKL(int trials, const std::vector<int>& depths, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Extremal search.

struct LeaderboardEntry {
  double ratio = 0;  // ||b||_ChF / ||T^b||
  double fourVariantRatio = 0;  // ||b||_ChF / max over the four parity variants
  int restart = 0;
  HaarExpansion<double> b;
};

struct ExtremalResult {
  int N = 0;
  long evaluations = 0;
  bool monotone = true;  // incumbent never decreased within a climb
  std::vector<LeaderboardEntry> leaderboard;  // best first, at most 10
};

struct ExtremalOptions {
  int N = 3;
  long budget = 2000;
  int restarts = 8;
  std::uint64_t seed = 1;
  SymbolGenerator generator{};
  bool singleHaarStart = false;
};

ExtremalResult extremalSearch(const ExtremalOptions& opt);
double chfOverCommutator(const HaarExpansion<double>& b, std::uint64_t seed = 7);

// ---------------------------------------------------------------------------
// One-parameter suite.

struct UncleCheck {
  long intervals = 0;
  long failures = 0;
  std::string firstFailure;
};
// B_f = 0 and <T* f>_I = +-|I0^|^{-1/2} (odd I0) or +-|parent(I0^)|^{-1/2} (even I0) for the uncle f.
UncleCheck verifyUncle(int N, std::uint64_t seed);

struct CWindow {
  int N = 0;
  long configurations = 0;
  long outside = 0;
  double minAbs = 0, maxAbs = 0;
  std::string firstOutside;
};
// c_I over I0 of level 2..N-2 and every I^ inside I0; the window [1/8, 1/sqrt2] is checked exactly.
CWindow cWindow(int N);

struct OneParameterReport {
  ConstantReport C;  // max over I0 of energy(I0) / (|I0| ||[T,b]||^2)
  std::vector<UncleCheck> uncle;
  std::vector<CWindow> windows;
  int sequenceTrials = 0;
  int sequenceFailures = 0;
};

OneParameterReport onePameterSuite(const std::vector<int>& depths, int trials, std::uint64_t seed);

}  // namespace dyadlab
