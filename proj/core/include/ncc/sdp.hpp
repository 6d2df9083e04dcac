#pragma once

// Small dense semidefinite programming: feasibility and linear-objective
// minimization over complex Hermitian PSD blocks plus free real variables,
// with equality constraints. Solved by a homogeneous self-dual interior-point
// method with deterministic initialization; statuses carry certificates.
//
//   minimize    Re( sum_b <C_b, X_b> ) + c_u . u
//   subject to  sum_b sum_t v_t X_b(i_t, j_t) + g . u = rhs   (complex, per row)
//               X_b Hermitian PSD, u in R^F.

#include "ncc/linalg.hpp"

#include <optional>
#include <string>

namespace ncc {

enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct SdpTerm {
    int block = 0;  // PSD block index
    int row = 0;
    int col = 0;
    Complex coeff;  // contributes coeff * X(row, col)
};

struct SdpFreeTerm {
    int index = 0;
    Complex coeff;
};

struct SdpConstraint {
    std::vector<SdpTerm> terms;
    std::vector<SdpFreeTerm> free_terms;
    Complex rhs;
};

class SdpProblem {
public:
    /// Adds a complex Hermitian PSD block of dimension n; returns its index.
    int add_block(const std::string& name, int n);
    /// Adds `count` real free variables; returns the index of the first.
    int add_free(int count);

    void add_constraint(SdpConstraint c);

    /// Objective terms (minimization). May be left empty for pure feasibility.
    void set_objective(std::vector<SdpTerm> terms, std::vector<SdpFreeTerm> free_terms = {});

    // Convenience: equality of a Hermitian-valued linear expression with a
    // Hermitian rhs, generating one scalar constraint per upper-triangle
    // entry. `entry(i, j)` must return the SdpConstraint for entry (i, j)
    // with its rhs already set.
    template <typename F>
    void add_matrix_equality(int dim, F&& entry) {
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) add_constraint(entry(i, j));
    }

    int num_blocks() const { return static_cast<int>(block_dims_.size()); }
    int block_dim(int b) const { return block_dims_[b]; }
    int num_free() const { return num_free_; }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }
    const std::vector<SdpConstraint>& constraints() const { return constraints_; }
    const std::vector<SdpTerm>& objective_terms() const { return obj_terms_; }
    const std::vector<SdpFreeTerm>& objective_free_terms() const { return obj_free_; }

    /// Documented JSON dump for cross-solver audit.
    std::string dump_json() const;

private:
    std::vector<int> block_dims_;
    std::vector<std::string> block_names_;
    int num_free_ = 0;
    std::vector<SdpConstraint> constraints_;
    std::vector<SdpTerm> obj_terms_;
    std::vector<SdpFreeTerm> obj_free_;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    std::vector<CMat> blocks;     // primal PSD blocks (Optimal) or improving ray (Unbounded)
    RVec free_values;             // free variables (Optimal)
    double objective = 0.0;       // primal objective (Optimal)
    double gap = 0.0;             // absolute duality gap estimate (Optimal)
    RVec dual;                    // one real multiplier pair per complex row, flattened
                                  // (Optimal: equality duals; Infeasible: improving ray)
    std::vector<CMat> dual_slack; // C - A*(y) per block (Optimal), or -A*(y) (Infeasible)
    double certificate_margin = 0.0;  // Infeasible: b^T y after normalization
    int iterations = 0;

    /// Complex multiplier of constraint k (pairs Re/Im internal rows).
    Complex dual_of(int k) const {
        return Complex(dual(2 * k), dual(2 * k + 1));
    }
};

SdpSolution solve_sdp(const SdpProblem& p, const Tolerances& tol);

/// Independent residual / certificate recheck using only the matrix kernel.
bool verify_sdp_solution(const SdpProblem& p, const SdpSolution& s, const Tolerances& tol);

}  // namespace ncc
