#pragma once

#include "nova/ainf.hpp"
#include "nova/linalg.hpp"
#include "nova/opsys.hpp"
#include "nova/report.hpp"

namespace nova {

// Transfer data between a complex (C, d) and a model (H, delta):
// i: H -> C, pi: C -> H degree 0, G: C -> C degree -1.
struct Contraction {
    GradedSpace H, C;
    Mat i, pi, G;      // i: dim(C) x dim(H), pi: dim(H) x dim(C), G: dim(C) x dim(C)
    Mat dC, deltaH;    // differentials carried along for the checks
    bool strong = false;
};

// Verifies the cochain-map equations, the homotopy equation, and (if flagged
// strong) the four side conditions, exactly on the basis.
VerificationReport check_contraction(const Contraction& c);

// Finite graded space with differential and positive-definite rational Gram
// pairing per degree.
struct InnerProductComplex {
    GradedSpace space;
    Mat d;     // degree +1
    Mat gram;  // symmetric positive definite, block-diagonal by degree
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& m) : std::runtime_error(m) {}
};

// Exact rational Hodge theory: adjoint from the Gram pairing, harmonic space,
// Green operator by linear solves, G = -Gr o delta. Returns a strong
// contraction whose H-basis absorbs the declared unit and divisor inputs
// whenever those vectors are harmonic.
Contraction harmonic_contraction(const InnerProductComplex& X);

// Canonical model by the inductive tree formulas: m_can on H and the
// inclusion homomorphism i_can with i_can_{1,0} = i, m_can_{1,0} = deltaH.
struct CanonicalModel {
    OperatorSystem<Rat> m_can;
    OperatorSystem<Rat> i_can;
};
CanonicalModel canonical_model(const OperatorSystem<Rat>& m, const Contraction& con);

// out <- M o op (postcompose the output vector with a matrix)
template <class R>
MultiOp<R> postcompose(const Mat& M, const MultiOp<R>& op) {
    MultiOp<R> out;
    out.arity = op.arity;
    for (auto& [in, row] : op.entries)
        for (auto& [o, c] : row)
            for (size_t r = 0; r < M.rows(); ++r)
                if (M(r, static_cast<size_t>(o)) != 0)
                    out.accumulate(in, static_cast<int>(r), R(M(r, static_cast<size_t>(o))) * c);
    return out;
}

// matrix as an arity-1 operator
MultiOp<Rat> matrix_op(const Mat& M);

}  // namespace nova
