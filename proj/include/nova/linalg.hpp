#pragma once

#include <optional>
#include <vector>

#include "nova/rational.hpp"

namespace nova {

// Dense exact matrices. Dimensions here are tiny (basis sizes <= 16, operator
// spaces up to a few thousand unknowns), so plain Gaussian elimination over
// GMP rationals is the whole story.
class Mat {
  public:
    Mat() : r_(0), c_(0) {}
    Mat(size_t r, size_t c) : r_(r), c_(c), a_(r * c, Rat(0)) {}
    static Mat identity(size_t n) {
        Mat m(n, n);
        for (size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    size_t rows() const { return r_; }
    size_t cols() const { return c_; }
    Rat& operator()(size_t i, size_t j) { return a_[i * c_ + j]; }
    const Rat& operator()(size_t i, size_t j) const { return a_[i * c_ + j]; }

    friend Mat operator*(const Mat& x, const Mat& y) {
        Mat z(x.r_, y.c_);
        for (size_t i = 0; i < x.r_; ++i)
            for (size_t k = 0; k < x.c_; ++k) {
                if (x(i, k) == 0) continue;
                for (size_t j = 0; j < y.c_; ++j) z(i, j) += x(i, k) * y(k, j);
            }
        return z;
    }
    friend Mat operator+(const Mat& x, const Mat& y) {
        Mat z = x;
        for (size_t i = 0; i < z.a_.size(); ++i) z.a_[i] += y.a_[i];
        return z;
    }
    friend Mat operator-(const Mat& x, const Mat& y) {
        Mat z = x;
        for (size_t i = 0; i < z.a_.size(); ++i) z.a_[i] -= y.a_[i];
        return z;
    }
    friend bool operator==(const Mat& x, const Mat& y) {
        return x.r_ == y.r_ && x.c_ == y.c_ && x.a_ == y.a_;
    }
    Mat transposed() const {
        Mat t(c_, r_);
        for (size_t i = 0; i < r_; ++i)
            for (size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }
    bool is_zero() const {
        for (auto& x : a_)
            if (x != 0) return false;
        return true;
    }
    std::vector<Rat> apply(const std::vector<Rat>& v) const {
        std::vector<Rat> w(r_, Rat(0));
        for (size_t i = 0; i < r_; ++i)
            for (size_t j = 0; j < c_; ++j)
                if ((*this)(i, j) != 0) w[i] += (*this)(i, j) * v[j];
        return w;
    }

  private:
    size_t r_, c_;
    std::vector<Rat> a_;
};

// Row-reduce [A | B] in place; returns pivot columns of A.
std::vector<size_t> rref(Mat& A, Mat* B = nullptr);

size_t rank(Mat A);

// One solution of A x = b, or nullopt. Free variables are set to zero, which
// makes the witness deterministic and minimal-support in the column order.
std::optional<std::vector<Rat>> solve(const Mat& A, const std::vector<Rat>& b);

// Basis of the nullspace of A, deterministic order.
std::vector<std::vector<Rat>> nullspace(const Mat& A);

std::optional<Mat> inverse(const Mat& A);

}  // namespace nova
