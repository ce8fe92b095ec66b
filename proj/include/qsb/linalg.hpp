#pragma once
// Dense exact matrices over a Value domain.

#include "qsb/fieldtower.hpp"

#include <optional>

namespace qsb {

struct Mat {
  FieldPtr F;
  int rows{0}, cols{0};
  std::vector<Value> a;
  Value& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const Value& at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  std::string str() const;
};

using Vec = std::vector<Value>;

Mat m_zero(const FieldPtr& F, int r, int c);
Mat m_identity(const FieldPtr& F, int n);
Mat m_mul(const Mat& A, const Mat& B);
Vec m_apply(const Mat& A, const Vec& x);
Mat m_transpose(const Mat& A);
Mat m_add(const Mat& A, const Mat& B);
Mat m_sub(const Mat& A, const Mat& B);
Mat m_scal(const Value& c, const Mat& A);
bool m_eq(const Mat& A, const Mat& B);
Value m_det(const Mat& A);
Mat m_inverse(const Mat& A); // Error SingularMatrix; over local rings requires unit pivots
int m_rank(const Mat& A);    // field domains only
std::vector<Vec> m_kernel(const Mat& A); // field domains only
Mat m_block_diag(const Mat& A, const Mat& B);
Mat m_from_rows(const FieldPtr& F, const std::vector<Vec>& rows);
Vec vec_add(const Vec& x, const Vec& y);
Vec vec_sub(const Vec& x, const Vec& y);
Vec vec_scal(const Value& c, const Vec& x);
bool vec_eq(const Vec& x, const Vec& y);
bool vec_is_zero(const Vec& x);
std::string vec_str(const Vec& x);
Vec vec_parse(const FieldPtr& F, const std::string& text); // "(1, t, 0)" or "1,t,0"

} // namespace qsb
