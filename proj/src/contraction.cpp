#include "nova/contraction.hpp"

#include <set>

namespace nova {

MultiOp<Rat> matrix_op(const Mat& M) {
    MultiOp<Rat> op;
    op.arity = 1;
    for (size_t j = 0; j < M.cols(); ++j)
        for (size_t i = 0; i < M.rows(); ++i)
            if (M(i, j) != 0) op.accumulate({static_cast<int>(j)}, static_cast<int>(i), M(i, j));
    return op;
}

VerificationReport check_contraction(const Contraction& c) {
    VerificationReport rep{"contraction"};
    auto expect_zero = [&](const Mat& M, const char* name) {
        if (!M.is_zero()) rep.fail(name, "-", "equation violated");
    };
    expect_zero(c.dC * c.i - c.i * c.deltaH, "cochain-i");
    expect_zero(c.pi * c.dC - c.deltaH * c.pi, "cochain-pi");
    Mat ip = c.i * c.pi;
    Mat id = Mat::identity(c.C.dim());
    expect_zero(ip - id - (c.dC * c.G + c.G * c.dC), "homotopy");
    if (c.strong) {
        expect_zero(c.pi * c.i - Mat::identity(c.H.dim()), "pi-i");
        expect_zero(c.G * c.G, "GG");
        expect_zero(c.G * c.i, "Gi");
        expect_zero(c.pi * c.G, "piG");
    }
    return rep;
}

namespace {

void check_graded_matrix(const GradedSpace& out_sp, const GradedSpace& in_sp, const Mat& M, int deg,
                         const char* what) {
    for (size_t i = 0; i < M.rows(); ++i)
        for (size_t j = 0; j < M.cols(); ++j)
            if (M(i, j) != 0 && out_sp.degree(static_cast<int>(i)) != in_sp.degree(static_cast<int>(j)) + deg)
                throw DataError(std::string(what) + " is not homogeneous of degree " + std::to_string(deg));
}

bool positive_definite_block(const Mat& gram, const std::vector<size_t>& idx) {
    // leading principal minors of the sub-block
    for (size_t n = 1; n <= idx.size(); ++n) {
        Mat sub(n, n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) sub(i, j) = gram(idx[i], idx[j]);
        // determinant by elimination
        Rat det(1);
        for (size_t c = 0; c < n; ++c) {
            size_t p = c;
            while (p < n && sub(p, c) == 0) ++p;
            if (p == n) return false;
            if (p != c) {
                for (size_t j = 0; j < n; ++j) std::swap(sub(p, j), sub(c, j));
                det = -det;
            }
            det *= sub(c, c);
            for (size_t r = c + 1; r < n; ++r) {
                if (sub(r, c) == 0) continue;
                Rat f = sub(r, c) / sub(c, c);
                for (size_t j = c; j < n; ++j) sub(r, j) -= f * sub(c, j);
            }
        }
        if (!(det > 0)) return false;
    }
    return true;
}

}  // namespace

Contraction harmonic_contraction(const InnerProductComplex& X) {
    const size_t n = X.space.dim();
    check_graded_matrix(X.space, X.space, X.d, 1, "d");
    // d^2 = 0
    if (!(X.d * X.d).is_zero()) throw DataError("d^2 != 0");
    // Gram: symmetric, degree-diagonal, positive definite per degree
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (X.gram(i, j) != X.gram(j, i)) throw DataError("Gram not symmetric");
            if (X.gram(i, j) != 0 && X.space.degree(static_cast<int>(i)) != X.space.degree(static_cast<int>(j)))
                throw DataError("Gram pairs different degrees");
        }
    std::set<int> degs(X.space.degrees.begin(), X.space.degrees.end());
    for (int dgr : degs) {
        std::vector<size_t> idx;
        for (size_t i = 0; i < n; ++i)
            if (X.space.degree(static_cast<int>(i)) == dgr) idx.push_back(i);
        if (!positive_definite_block(X.gram, idx)) throw DataError("Gram not positive definite");
    }

    Mat ginv = *inverse(X.gram);
    Mat delta = ginv * X.d.transposed() * X.gram;  // adjoint of d
    Mat lap = X.d * delta + delta * X.d;

    // harmonic space = ker d  cap  ker delta
    Mat stacked(2 * n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            stacked(i, j) = X.d(i, j);
            stacked(n + i, j) = delta(i, j);
        }
    auto harm = nullspace(stacked);

    // absorb designated vectors (unit first, then divisor inputs) into the
    // basis by exchange, so they become coordinate vectors of H
    std::vector<std::vector<Rat>> designated;
    std::vector<std::string> desig_names;
    std::vector<int> desig_roles;  // 0 = unit, >0 = divisor position
    auto try_designate = [&](int idx_in_C, const std::string& nm, int role) {
        std::vector<Rat> v(n, Rat(0));
        v[static_cast<size_t>(idx_in_C)] = 1;
        // harmonic iff d v = 0 and delta v = 0
        for (size_t r = 0; r < n; ++r) {
            Rat dv(0), qv(0);
            for (size_t c = 0; c < n; ++c) {
                dv += X.d(r, c) * v[c];
                qv += delta(r, c) * v[c];
            }
            if (dv != 0 || qv != 0) return;
        }
        designated.push_back(std::move(v));
        desig_names.push_back(nm);
        desig_roles.push_back(role);
    };
    if (X.space.unit >= 0) try_designate(X.space.unit, X.space.name(X.space.unit), 0);
    for (size_t d2 = 0; d2 < X.space.divisor_basis.size(); ++d2)
        try_designate(X.space.divisor_basis[d2], X.space.name(X.space.divisor_basis[d2]),
                      static_cast<int>(d2) + 1);

    // basis exchange: greedily replace harmonic-basis vectors by designated ones
    std::vector<std::vector<Rat>> basis = harm;
    std::vector<int> role_of(basis.size(), -1);  // -1 ordinary
    std::vector<std::string> name_of(basis.size());
    for (size_t t = 0; t < designated.size(); ++t) {
        // coordinates of designated[t] in current basis: solve basis-matrix x = v
        Mat B(n, basis.size());
        for (size_t j = 0; j < basis.size(); ++j)
            for (size_t i = 0; i < n; ++i) B(i, j) = basis[j][i];
        auto coords = solve(B, designated[t]);
        if (!coords) throw DataError("designated vector not harmonic-spanned");
        // pick a replaceable slot with nonzero coefficient
        size_t slot = basis.size();
        for (size_t j = 0; j < coords->size(); ++j)
            if ((*coords)[j] != 0 && role_of[j] == -1) {
                slot = j;
                break;
            }
        if (slot == basis.size()) throw DataError("basis exchange failed");
        basis[slot] = designated[t];
        role_of[slot] = desig_roles[t];
        name_of[slot] = desig_names[t];
    }

    // order: unit, divisors in order, then the rest (stable)
    std::vector<size_t> order;
    for (size_t j = 0; j < basis.size(); ++j)
        if (role_of[j] == 0) order.push_back(j);
    for (int want = 1; want <= static_cast<int>(X.space.divisor_basis.size()); ++want)
        for (size_t j = 0; j < basis.size(); ++j)
            if (role_of[j] == want) order.push_back(j);
    for (size_t j = 0; j < basis.size(); ++j)
        if (role_of[j] == -1) order.push_back(j);

    Contraction con;
    con.C = X.space;
    int anon = 0;
    for (size_t t = 0; t < order.size(); ++t) {
        size_t j = order[t];
        int dgr = 0;
        for (size_t i = 0; i < n; ++i)
            if (basis[j][i] != 0) {
                dgr = X.space.degree(static_cast<int>(i));
                break;
            }
        std::string nm = role_of[j] >= 0 ? name_of[j] : ("h" + std::to_string(anon++));
        con.H.add(nm, dgr);
        if (role_of[j] == 0) con.H.unit = static_cast<int>(t);
        if (role_of[j] > 0) con.H.divisor_basis.push_back(static_cast<int>(t));
    }

    con.i = Mat(n, basis.size());
    for (size_t t = 0; t < order.size(); ++t)
        for (size_t i = 0; i < n; ++i) con.i(i, t) = basis[order[t]][i];

    // pi = (B^T g B)^{-1} B^T g  (g-orthogonal projection in H coordinates)
    Mat BtG = con.i.transposed() * X.gram;
    Mat gramH = BtG * con.i;
    con.pi = *inverse(gramH) * BtG;

    // Green operator: solve [lap; B^T gram] eta = [x - i pi x; 0] columnwise
    Mat proj = con.i * con.pi;
    Mat rhsM = Mat::identity(n) - proj;
    Mat Gr(n, n);
    size_t h = basis.size();
    Mat A(n + h, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) A(i, j) = lap(i, j);
    for (size_t i = 0; i < h; ++i)
        for (size_t j = 0; j < n; ++j) A(n + i, j) = BtG(i, j);
    for (size_t col = 0; col < n; ++col) {
        std::vector<Rat> b(n + h, Rat(0));
        for (size_t i = 0; i < n; ++i) b[i] = rhsM(i, col);
        auto eta = solve(A, b);
        if (!eta) throw DataError("Green operator solve failed (Laplacian singular off harmonics)");
        for (size_t i = 0; i < n; ++i) Gr(i, col) = (*eta)[i];
    }
    con.G = Mat(n, n);
    {
        Mat temp = Gr * delta;
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) con.G(i, j) = -temp(i, j);
    }
    con.dC = X.d;
    con.deltaH = Mat(h, h);  // harmonic model is minimal
    con.strong = true;
    return con;
}

CanonicalModel canonical_model(const OperatorSystem<Rat>& m, const Contraction& con) {
    if (!(m.src == con.C)) throw SpaceMismatch("canonical_model: contraction C differs from the algebra space");
    {
        auto* m1 = m.find(1, zero_class(m.group.rank));
        MultiOp<Rat> want = matrix_op(con.dC);
        MultiOp<Rat> zero1;
        zero1.arity = 1;
        if (!((m1 ? *m1 : zero1) == want))
            throw SpaceMismatch("canonical_model: contraction differential differs from m_{1,0}");
    }

    CanonicalModel out;
    out.m_can.src = out.m_can.tgt = con.H;
    out.m_can.group = m.group;
    out.m_can.ctx = m.ctx;
    out.m_can.kind = SystemKind::Algebra;
    out.i_can.src = con.H;
    out.i_can.tgt = con.C;
    out.i_can.group = m.group;
    out.i_can.ctx = m.ctx;
    out.i_can.kind = SystemKind::Homomorphism;

    LabelClass zero = zero_class(m.group.rank);
    // base case (1,0)
    out.i_can.at(1, zero).accumulate_op(matrix_op(con.i), Rat(1));
    out.i_can.prune(OpKey{1, zero});
    out.m_can.at(1, zero).accumulate_op(matrix_op(con.deltaH), Rat(1));
    out.m_can.prune(OpKey{1, zero});

    // recursion keys ordered by (E(beta), k)
    auto monoid = m.group.enumerate_support(m.ctx.e_max);
    std::vector<OpKey> keys;
    for (auto& b : monoid)
        for (int k = 0; k <= m.ctx.k_max; ++k) keys.push_back(OpKey{k, b});
    std::sort(keys.begin(), keys.end(), [&](const OpKey& a, const OpKey& b) {
        Rat ea = m.group.energy_of(a.beta), eb = m.group.energy_of(b.beta);
        if (ea != eb) return ea < eb;
        if (a.k != b.k) return a.k < b.k;
        return a.beta < b.beta;
    });

    for (auto& key : keys) {
        if (key.k == 0 && is_zero_class(key.beta)) continue;
        if (key.k == 1 && is_zero_class(key.beta)) continue;
        // inner sum over m-components (l, b0) != (1,0), blocks from i_can
        MultiOp<Rat> inner;
        inner.arity = key.k;
        for (auto& [mkey, mop] : m.comps) {
            if (mkey.k == 1 && is_zero_class(mkey.beta)) continue;
            LabelClass need = sub_class(key.beta, mkey.beta);
            if (m.group.energy_of(need) < 0) continue;
            // choose i_can blocks with total (key.k, need)
            std::vector<const MultiOp<Rat>*> blocks(static_cast<size_t>(mkey.k));
            std::vector<int> twists(static_cast<size_t>(mkey.k), 0);
            std::vector<std::pair<OpKey, const MultiOp<Rat>*>> icomps;
            for (auto& [ikey, iop] : out.i_can.comps) icomps.push_back({ikey, &iop});
            LabelClass acc_b = zero;
            int acc_k = 0;
            auto rec = [&](auto&& self, int slot) -> void {
                if (slot == mkey.k) {
                    if (acc_k == key.k && acc_b == need)
                        inner.accumulate_op(compose_blocks(mop, con.H, blocks, twists), Rat(1));
                    return;
                }
                for (auto& [ikey, iop] : icomps) {
                    if (acc_k + ikey.k > key.k) continue;
                    LabelClass nb = add_class(acc_b, ikey.beta);
                    if (m.group.energy_of(sub_class(need, nb)) < 0) continue;
                    blocks[static_cast<size_t>(slot)] = iop;
                    int sk = acc_k;
                    LabelClass sb = acc_b;
                    acc_k += ikey.k;
                    acc_b = nb;
                    self(self, slot + 1);
                    acc_k = sk;
                    acc_b = sb;
                }
            };
            if (mkey.k == 0) {
                if (key.k == 0 && need == zero) inner.accumulate_op(mop, Rat(1));
            } else {
                rec(rec, 0);
            }
        }
        if (inner.is_zero()) continue;
        out.i_can.accumulate(key, postcompose(con.G, inner), Rat(1));
        out.m_can.accumulate(key, postcompose(con.pi, inner), Rat(1));
    }
    out.i_can.prune_all();
    out.m_can.prune_all();
    return out;
}

}  // namespace nova
