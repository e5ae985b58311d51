#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nomabeam {

struct LinTerm {
    int var = 0;
    double coeff = 0.0;
};

/// Affine expression sum(coeff_j * x_j) + constant, used to assemble rows.
struct LinExpr {
    std::vector<LinTerm> terms;
    double constant = 0.0;

    LinExpr() = default;
    explicit LinExpr(double c) : constant(c) {}

    LinExpr& add(int var, double coeff) {
        if (coeff != 0.0) terms.push_back({var, coeff});
        return *this;
    }
};

inline LinExpr var_expr(int var, double coeff = 1.0) {
    LinExpr e;
    e.add(var, coeff);
    return e;
}

enum class ConeBlockKind { Nonneg, SecondOrder };

/// A contiguous slice of the slack vector constrained to a cone.
struct ConeBlock {
    ConeBlockKind kind = ConeBlockKind::Nonneg;
    int offset = 0;  // first slack index of the slice
    int dim = 0;
};

/// Linear objective (maximize c'x) over affine rows and cone memberships.
/// Inequalities and SOC entries are lowered to slacks s = rhs - expr with the
/// cone blocks referencing disjoint slices of s.
class ConeProgram {
public:
    int add_var();
    int add_vars(int count);
    int num_vars() const { return num_vars_; }

    // maximize objective
    void set_objective_coeff(int var, double coeff);
    const std::vector<double>& objective() const { return objective_; }

    void add_le(const LinExpr& e, double rhs);              // e <= rhs
    void add_ge(const LinExpr& e, double rhs);              // e >= rhs
    void add_eq(const LinExpr& e, double rhs);              // e == rhs
    void add_soc(const std::vector<LinExpr>& entries);      // entries[0] >= ||entries[1:]||

    int num_eq_rows() const { return static_cast<int>(eq_rows_.size()); }
    int num_nonneg_rows() const { return static_cast<int>(ineq_rows_.size()); }
    int num_soc_blocks() const { return static_cast<int>(soc_blocks_.size()); }
    int num_cone_rows() const;  // total slack dimension

    /// Cone blocks in slack order: one Nonneg block (if any), then the SOCs.
    std::vector<ConeBlock> cone_blocks() const;

    /// Plain-text dump (matrix-market-style coordinate listing) for offline
    /// inspection of an assembled program.
    void dump(std::ostream& os) const;
    void dump_to_file(const std::string& path) const;

    struct Row {
        std::vector<LinTerm> terms;
        double rhs = 0.0;  // slack = rhs - terms.x
    };

    const std::vector<Row>& eq_rows() const { return eq_rows_; }
    const std::vector<Row>& nonneg_rows() const { return ineq_rows_; }
    const std::vector<std::vector<Row>>& soc_rows() const { return soc_blocks_; }

private:
    void check_expr(const LinExpr& e) const;

    int num_vars_ = 0;
    std::vector<double> objective_;
    std::vector<Row> eq_rows_;
    std::vector<Row> ineq_rows_;
    std::vector<std::vector<Row>> soc_blocks_;
};

/// Appends `pieces` secant cuts z >= secant_m(rho) interpolating 2^rho on a
/// uniform partition of [rho_lo, rho_hi], plus the box rho in [rho_lo, rho_hi].
/// Each secant over-estimates 2^rho on its sub-interval, so the added rows are
/// an inner approximation of { z >= 2^rho }.
void add_exp_upper_envelope(ConeProgram& p, int z_var, int rho_var,
                            double rho_lo, double rho_hi, int pieces);

/// Largest required z over 2^rho implied by the envelope at a given rho
/// (test/diagnostic helper; rho must lie in [rho_lo, rho_hi]).
double exp_envelope_requirement(double rho, double rho_lo, double rho_hi, int pieces);

}  // namespace nomabeam
