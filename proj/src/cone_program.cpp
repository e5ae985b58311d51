#include "nomabeam/cone_program.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace nomabeam {

int ConeProgram::add_var() {
    objective_.push_back(0.0);
    return num_vars_++;
}

int ConeProgram::add_vars(int count) {
    if (count < 1) throw std::invalid_argument("add_vars: count must be positive");
    const int first = num_vars_;
    for (int i = 0; i < count; ++i) add_var();
    return first;
}

void ConeProgram::set_objective_coeff(int var, double coeff) {
    if (var < 0 || var >= num_vars_)
        throw std::invalid_argument("set_objective_coeff: variable out of range");
    objective_[var] = coeff;
}

void ConeProgram::check_expr(const LinExpr& e) const {
    for (const LinTerm& t : e.terms) {
        if (t.var < 0 || t.var >= num_vars_)
            throw std::invalid_argument("ConeProgram: expression references unknown variable");
        if (!std::isfinite(t.coeff))
            throw std::invalid_argument("ConeProgram: non-finite coefficient");
    }
    if (!std::isfinite(e.constant))
        throw std::invalid_argument("ConeProgram: non-finite constant");
}

void ConeProgram::add_le(const LinExpr& e, double rhs) {
    check_expr(e);
    ineq_rows_.push_back({e.terms, rhs - e.constant});
}

void ConeProgram::add_ge(const LinExpr& e, double rhs) {
    LinExpr neg;
    neg.constant = -e.constant;
    for (const LinTerm& t : e.terms) neg.add(t.var, -t.coeff);
    add_le(neg, -rhs);
}

void ConeProgram::add_eq(const LinExpr& e, double rhs) {
    check_expr(e);
    eq_rows_.push_back({e.terms, rhs - e.constant});
}

void ConeProgram::add_soc(const std::vector<LinExpr>& entries) {
    if (entries.size() < 2)
        throw std::invalid_argument("add_soc: need a head entry and at least one tail entry");
    std::vector<Row> rows;
    rows.reserve(entries.size());
    for (const LinExpr& e : entries) {
        check_expr(e);
        // slack = e, i.e. rhs - (-e.terms).x with rhs = e.constant
        Row r;
        r.rhs = e.constant;
        r.terms.reserve(e.terms.size());
        for (const LinTerm& t : e.terms) r.terms.push_back({t.var, -t.coeff});
        rows.push_back(std::move(r));
    }
    soc_blocks_.push_back(std::move(rows));
}

int ConeProgram::num_cone_rows() const {
    int m = static_cast<int>(ineq_rows_.size());
    for (const auto& blk : soc_blocks_) m += static_cast<int>(blk.size());
    return m;
}

std::vector<ConeBlock> ConeProgram::cone_blocks() const {
    std::vector<ConeBlock> blocks;
    int offset = 0;
    if (!ineq_rows_.empty()) {
        blocks.push_back({ConeBlockKind::Nonneg, 0, static_cast<int>(ineq_rows_.size())});
        offset = static_cast<int>(ineq_rows_.size());
    }
    for (const auto& blk : soc_blocks_) {
        blocks.push_back({ConeBlockKind::SecondOrder, offset, static_cast<int>(blk.size())});
        offset += static_cast<int>(blk.size());
    }
    return blocks;
}

namespace {

void dump_rows(std::ostream& os, const char* tag,
               const std::vector<ConeProgram::Row>& rows, int row_base) {
    for (size_t r = 0; r < rows.size(); ++r) {
        for (const LinTerm& t : rows[r].terms)
            os << tag << ' ' << row_base + r << ' ' << t.var << ' ' << t.coeff << '\n';
        os << tag << "_rhs " << row_base + r << ' ' << rows[r].rhs << '\n';
    }
}

}  // namespace

void ConeProgram::dump(std::ostream& os) const {
    os << "%%ConeProgram coordinate dump\n";
    os << "vars " << num_vars_ << '\n';
    os << "eq_rows " << eq_rows_.size() << " nonneg_rows " << ineq_rows_.size()
       << " soc_blocks " << soc_blocks_.size() << '\n';
    for (int j = 0; j < num_vars_; ++j)
        if (objective_[j] != 0.0) os << "obj " << j << ' ' << objective_[j] << '\n';
    dump_rows(os, "eq", eq_rows_, 0);
    dump_rows(os, "le", ineq_rows_, 0);
    int base = 0;
    for (size_t k = 0; k < soc_blocks_.size(); ++k) {
        os << "soc_block " << k << " dim " << soc_blocks_[k].size() << '\n';
        dump_rows(os, "soc", soc_blocks_[k], base);
        base += static_cast<int>(soc_blocks_[k].size());
    }
}

void ConeProgram::dump_to_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("dump_to_file: cannot open " + path);
    dump(os);
}

void add_exp_upper_envelope(ConeProgram& p, int z_var, int rho_var,
                            double rho_lo, double rho_hi, int pieces) {
    if (!(rho_lo < rho_hi))
        throw std::invalid_argument("add_exp_upper_envelope: need rho_lo < rho_hi");
    if (pieces < 1)
        throw std::invalid_argument("add_exp_upper_envelope: need at least one piece");

    const double width = (rho_hi - rho_lo) / pieces;
    for (int m = 0; m < pieces; ++m) {
        const double a = rho_lo + m * width;
        const double b = a + width;
        const double fa = std::exp2(a);
        const double slope = (std::exp2(b) - fa) / width;
        // z >= fa + slope * (rho - a)
        LinExpr e;
        e.add(z_var, 1.0).add(rho_var, -slope);
        p.add_ge(e, fa - slope * a);
    }
    p.add_ge(var_expr(rho_var), rho_lo);
    p.add_le(var_expr(rho_var), rho_hi);
}

double exp_envelope_requirement(double rho, double rho_lo, double rho_hi, int pieces) {
    if (rho < rho_lo || rho > rho_hi)
        throw std::invalid_argument("exp_envelope_requirement: rho outside the box");
    const double width = (rho_hi - rho_lo) / pieces;
    double req = 0.0;
    for (int m = 0; m < pieces; ++m) {
        const double a = rho_lo + m * width;
        const double fa = std::exp2(a);
        const double slope = (std::exp2(a + width) - fa) / width;
        req = std::max(req, fa + slope * (rho - a));
    }
    return req;
}

}  // namespace nomabeam
