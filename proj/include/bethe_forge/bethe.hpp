#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "bethe_forge/nesting.hpp"

namespace bf {

struct DegenerateSpectrum : Error { using Error::Error; };
struct LeadingCoeffUnderflow : Error { using Error::Error; };
struct RootCollision : Error { using Error::Error; };

using cplx = std::complex<double>;
using CPoly = std::vector<cplx>;   // lowest degree first

struct BetheOptions {
    Rat u0 = Rat(1, 3);
    double tol = 1e-9;
    int retries = 5;
    std::uint64_t seed = 1;
};

struct EigenState {
    int id = 0;
    int sector = 0;
    std::vector<int> weight;   // multiplicity of each spin direction
    std::vector<cplx> vec;     // full-space eigenvector, unit norm
};

struct Eigenbasis {
    std::vector<EigenState> states;
    int attempts = 0;          // largest number of combinations tried in any sector
};

// Exact operators cached by index set.
class QStore {
public:
    explicit QStore(const Twist& tw) : tw_(tw) {}
    const TensorOperator& get(IndexSet I);
    const Twist& twist() const { return tw_; }

private:
    const Twist& tw_;
    std::map<std::uint32_t, TensorOperator> cache_;
};

// Common eigenbasis of a commuting family, sector by sector, from a seeded random
// combination at u0 (each operator scaled to unit max entry there).
Eigenbasis diagonalize_family(const Twist& tw, const std::vector<TensorOperator>& ops, const BetheOptions& opt);

struct QFunction {
    IndexSet I;
    int state = 0;
    CPoly coeffs;              // trimmed, lowest degree first
    std::vector<cplx> roots;
    cplx leading;
    int degree = 0;
    int expected_degree = 0;   // #{n : k_n in I}
};

// Eigenvalue polynomial of q on every state; the Rayleigh quotient is taken with
// each coefficient matrix. Coefficients below tol * max are trimmed from the top.
std::vector<QFunction> q_functions(const TensorOperator& q, IndexSet I, const Twist& tw, const Eigenbasis& basis, double tol);
std::vector<QFunction> q_functions(IndexSet I, const Twist& tw, const Eigenbasis& basis, double tol);

// Eigenvalue polynomial of an arbitrary operator on one state (no trimming).
CPoly eigenvalue_poly(const TensorOperator& op, const EigenState& state);

// Which Bethe equation applies to a step adding i then j on top of I.
enum class BaeForm { BB, FF, BF, FB };
BaeForm bae_form(int i, int j, const Twist& tw);
const char* bae_form_name(BaeForm f);

struct BaeEntry {
    int state = 0;
    int level = 0;             // the equation sits at the roots of Q_{I_level}
    IndexSet I;
    int i = 0, j = 0;
    BaeForm form = BaeForm::BB;
    std::vector<cplx> roots;
    std::vector<double> residuals;   // |ratio - target| per root
    bool collision = false;
    bool pass = true;
};

// all_pass covers the entries that are not flagged; flagged entries have
// colliding roots or a root on a zero of the denominator
struct BaeReport {
    std::vector<BaeEntry> entries;
    int flagged = 0;
    double max_residual = 0;
    bool all_pass = true;
};

BaeReport check_bae(const NestingPath& path, const Twist& tw, const Eigenbasis& basis, double tol);
BaeReport check_bae(const NestingPath& path, QStore& qs, const Eigenbasis& basis, double tol);

struct DivisibilityEntry {
    int state = 0;
    double remainder = 0;      // max |remainder coefficient| / scale
    bool pass = true;
};

struct DivisibilityReport {
    IndexSet I;
    int i = 0, j = 0;
    BaeForm form = BaeForm::BB;
    std::vector<DivisibilityEntry> entries;
    bool all_pass = true;
};

// Q_{I,i} divides the grading-appropriate combination, checked per eigenstate
DivisibilityReport check_op_divisibility(IndexSet I, int i, int j, const Twist& tw, const Eigenbasis& basis, double tol);
DivisibilityReport check_op_divisibility(IndexSet I, int i, int j, QStore& qs, const Eigenbasis& basis, double tol);

struct ReconstructionReport {
    std::vector<double> rel_error;   // per state, max over sample points
    double max_rel_error = 0;
    bool all_pass = true;
};

// T^1 eigenvalues rebuilt from Q-functions along the path, against the transfer matrix
ReconstructionReport check_reconstruction(const NestingPath& path, QStore& qs, const TensorOperator& t1,
                                          const Eigenbasis& basis, double tol);

// T^1 eigenvalue from Q eigenvalues along a path, at one point
cplx rebuilt_t1(const NestingPath& path, const Twist& tw, const std::map<std::uint32_t, CPoly>& q, cplx u);

cplx poly_eval(const CPoly& p, cplx u);
CPoly poly_shift(const CPoly& p, double a);   // p(u + a)
CPoly poly_mul(const CPoly& a, const CPoly& b);
CPoly poly_rem(const CPoly& a, const CPoly& b);
std::vector<cplx> poly_roots(const CPoly& p);   // companion matrix

struct SpectrumReport {
    Twist tw;
    std::vector<NestingPath> paths;
    BetheOptions opt;
    Eigenbasis basis;
    std::vector<std::vector<QFunction>> q;   // per index-set mask, per state
    std::vector<BaeReport> bae;              // per path
    std::vector<ReconstructionReport> rec;   // per path
    bool path_independent = true;
    double path_spread = 0;
    bool degree_law = true;
    bool ok() const;
};

SpectrumReport run_spectrum(const Twist& tw, const std::vector<NestingPath>& paths, const BetheOptions& opt);
nlohmann::ordered_json spectrum_json(const SpectrumReport& r);
std::string roots_csv(const SpectrumReport& r);

}  // namespace bf
