#include "nova/linalg.hpp"

namespace nova {

std::vector<size_t> rref(Mat& A, Mat* B) {
    std::vector<size_t> pivots;
    size_t row = 0;
    for (size_t col = 0; col < A.cols() && row < A.rows(); ++col) {
        size_t sel = row;
        while (sel < A.rows() && A(sel, col) == 0) ++sel;
        if (sel == A.rows()) continue;
        if (sel != row) {
            for (size_t j = 0; j < A.cols(); ++j) std::swap(A(sel, j), A(row, j));
            if (B)
                for (size_t j = 0; j < B->cols(); ++j) std::swap((*B)(sel, j), (*B)(row, j));
        }
        Rat inv = Rat(1) / A(row, col);
        for (size_t j = 0; j < A.cols(); ++j) A(row, j) *= inv;
        if (B)
            for (size_t j = 0; j < B->cols(); ++j) (*B)(row, j) *= inv;
        for (size_t i = 0; i < A.rows(); ++i) {
            if (i == row || A(i, col) == 0) continue;
            Rat f = A(i, col);
            for (size_t j = 0; j < A.cols(); ++j) A(i, j) -= f * A(row, j);
            if (B)
                for (size_t j = 0; j < B->cols(); ++j) (*B)(i, j) -= f * (*B)(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

size_t rank(Mat A) { return rref(A).size(); }

std::optional<std::vector<Rat>> solve(const Mat& A, const std::vector<Rat>& b) {
    Mat M = A;
    Mat rhs(A.rows(), 1);
    for (size_t i = 0; i < A.rows(); ++i) rhs(i, 0) = b[i];
    auto pivots = rref(M, &rhs);
    // consistency: zero rows of M must have zero rhs
    for (size_t i = pivots.size(); i < M.rows(); ++i)
        if (rhs(i, 0) != 0) return std::nullopt;
    std::vector<Rat> x(A.cols(), Rat(0));
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = rhs(r, 0);
    return x;
}

std::vector<std::vector<Rat>> nullspace(const Mat& A) {
    Mat M = A;
    auto pivots = rref(M);
    std::vector<bool> is_pivot(A.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::vector<Rat>> basis;
    for (size_t free = 0; free < A.cols(); ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rat> v(A.cols(), Rat(0));
        v[free] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -M(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<Mat> inverse(const Mat& A) {
    if (A.rows() != A.cols()) return std::nullopt;
    Mat M = A, I = Mat::identity(A.rows());
    auto pivots = rref(M, &I);
    if (pivots.size() != A.rows()) return std::nullopt;
    return I;
}

}  // namespace nova
