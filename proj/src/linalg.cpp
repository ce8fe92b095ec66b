#include "qsb/linalg.hpp"

#include <functional>
#include <sstream>

namespace qsb {

Mat m_zero(const FieldPtr& F, int r, int c) {
  Mat m;
  m.F = F;
  m.rows = r;
  m.cols = c;
  m.a.assign(static_cast<size_t>(r) * c, v_zero(F));
  return m;
}

Mat m_identity(const FieldPtr& F, int n) {
  Mat m = m_zero(F, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = v_one(F);
  return m;
}

Mat m_mul(const Mat& A, const Mat& B) {
  if (A.cols != B.rows) throw Error("DimensionMismatch", "matrix product");
  Mat C = m_zero(A.F, A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      if (v_is_zero(A.at(i, k))) continue;
      for (int j = 0; j < B.cols; ++j)
        C.at(i, j) = v_add(C.at(i, j), v_mul(A.at(i, k), B.at(k, j)));
    }
  return C;
}

Vec m_apply(const Mat& A, const Vec& x) {
  if (A.cols != static_cast<int>(x.size())) throw Error("DimensionMismatch", "matrix apply");
  Vec y(A.rows, v_zero(A.F));
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) y[i] = v_add(y[i], v_mul(A.at(i, j), x[j]));
  return y;
}

Mat m_transpose(const Mat& A) {
  Mat C = m_zero(A.F, A.cols, A.rows);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) C.at(j, i) = A.at(i, j);
  return C;
}

Mat m_add(const Mat& A, const Mat& B) {
  Mat C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = v_add(C.a[i], B.a[i]);
  return C;
}

Mat m_sub(const Mat& A, const Mat& B) {
  Mat C = A;
  for (size_t i = 0; i < C.a.size(); ++i) C.a[i] = v_sub(C.a[i], B.a[i]);
  return C;
}

Mat m_scal(const Value& c, const Mat& A) {
  Mat C = A;
  for (auto& x : C.a) x = v_mul(c, x);
  return C;
}

bool m_eq(const Mat& A, const Mat& B) {
  if (A.rows != B.rows || A.cols != B.cols) return false;
  for (size_t i = 0; i < A.a.size(); ++i)
    if (!v_eq(A.a[i], B.a[i])) return false;
  return true;
}

static bool try_inv(const Value& x, Value& out) {
  if (v_is_zero(x)) return false;
  try {
    out = v_inv(x);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Value m_det(const Mat& A) {
  if (A.rows != A.cols) throw Error("DimensionMismatch", "determinant of non-square matrix");
  int n = A.rows;
  // Gaussian elimination with invertible pivots; cofactor fallback for
  // non-field domains where no invertible pivot exists in a column.
  Mat M = A;
  Value det = v_one(A.F);
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    Value pinv;
    for (int i = k; i < n; ++i)
      if (try_inv(M.at(i, k), pinv)) {
        piv = i;
        break;
      }
    if (piv < 0) {
      bool allzero = true;
      for (int i = k; i < n; ++i)
        if (!v_is_zero(M.at(i, k))) allzero = false;
      if (allzero) return v_zero(A.F);
      // cofactor expansion along column k of the remaining block
      std::function<Value(const Mat&)> cof = [&](const Mat& B) -> Value {
        int m = B.rows;
        if (m == 1) return B.at(0, 0);
        Value s = v_zero(B.F);
        for (int i = 0; i < m; ++i) {
          if (v_is_zero(B.at(i, 0))) continue;
          Mat sub = m_zero(B.F, m - 1, m - 1);
          for (int r = 0, rr = 0; r < m; ++r) {
            if (r == i) continue;
            for (int c = 1; c < m; ++c) sub.at(rr, c - 1) = B.at(r, c);
            ++rr;
          }
          Value t = v_mul(B.at(i, 0), cof(sub));
          s = (i % 2) ? v_sub(s, t) : v_add(s, t);
        }
        return s;
      };
      Mat rest = m_zero(A.F, n - k, n - k);
      for (int i = k; i < n; ++i)
        for (int j = k; j < n; ++j) rest.at(i - k, j - k) = M.at(i, j);
      return v_mul(det, cof(rest));
    }
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(M.at(piv, j), M.at(k, j));
      det = v_neg(det);
    }
    pinv = v_inv(M.at(k, k));
    det = v_mul(det, M.at(k, k));
    for (int i = k + 1; i < n; ++i) {
      if (v_is_zero(M.at(i, k))) continue;
      Value c = v_mul(M.at(i, k), pinv);
      for (int j = k; j < n; ++j) M.at(i, j) = v_sub(M.at(i, j), v_mul(c, M.at(k, j)));
    }
  }
  return det;
}

Mat m_inverse(const Mat& A) {
  if (A.rows != A.cols) throw Error("DimensionMismatch", "inverse of non-square matrix");
  int n = A.rows;
  Mat M = A, I = m_identity(A.F, n);
  for (int k = 0; k < n; ++k) {
    int piv = -1;
    Value pinv;
    for (int i = k; i < n; ++i)
      if (try_inv(M.at(i, k), pinv)) {
        piv = i;
        break;
      }
    if (piv < 0) throw Error("SingularMatrix", "no invertible pivot in column " + std::to_string(k));
    if (piv != k)
      for (int j = 0; j < n; ++j) {
        std::swap(M.at(piv, j), M.at(k, j));
        std::swap(I.at(piv, j), I.at(k, j));
      }
    Value c = v_inv(M.at(k, k));
    for (int j = 0; j < n; ++j) {
      M.at(k, j) = v_mul(c, M.at(k, j));
      I.at(k, j) = v_mul(c, I.at(k, j));
    }
    for (int i = 0; i < n; ++i) {
      if (i == k || v_is_zero(M.at(i, k))) continue;
      Value d = M.at(i, k);
      for (int j = 0; j < n; ++j) {
        M.at(i, j) = v_sub(M.at(i, j), v_mul(d, M.at(k, j)));
        I.at(i, j) = v_sub(I.at(i, j), v_mul(d, I.at(k, j)));
      }
    }
  }
  return I;
}

static Mat row_echelon(Mat M, int& rank) {
  int r = 0;
  for (int c = 0; c < M.cols && r < M.rows; ++c) {
    int piv = -1;
    for (int i = r; i < M.rows; ++i)
      if (!v_is_zero(M.at(i, c))) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    if (piv != r)
      for (int j = 0; j < M.cols; ++j) std::swap(M.at(piv, j), M.at(r, j));
    Value inv = v_inv(M.at(r, c));
    for (int j = 0; j < M.cols; ++j) M.at(r, j) = v_mul(inv, M.at(r, j));
    for (int i = 0; i < M.rows; ++i) {
      if (i == r || v_is_zero(M.at(i, c))) continue;
      Value d = M.at(i, c);
      for (int j = 0; j < M.cols; ++j) M.at(i, j) = v_sub(M.at(i, j), v_mul(d, M.at(r, j)));
    }
    ++r;
  }
  rank = r;
  return M;
}

int m_rank(const Mat& A) {
  int r = 0;
  row_echelon(A, r);
  return r;
}

std::vector<Vec> m_kernel(const Mat& A) {
  int r = 0;
  Mat E = row_echelon(A, r);
  // locate pivot columns
  std::vector<int> pivcol(r, -1);
  std::vector<bool> ispiv(A.cols, false);
  for (int i = 0, c = 0; i < r; ++i) {
    while (c < A.cols && v_is_zero(E.at(i, c))) ++c;
    pivcol[i] = c;
    ispiv[c] = true;
  }
  std::vector<Vec> basis;
  for (int c = 0; c < A.cols; ++c) {
    if (ispiv[c]) continue;
    Vec v(A.cols, v_zero(A.F));
    v[c] = v_one(A.F);
    for (int i = 0; i < r; ++i) v[pivcol[i]] = v_neg(E.at(i, c));
    basis.push_back(v);
  }
  return basis;
}

Mat m_block_diag(const Mat& A, const Mat& B) {
  Mat C = m_zero(A.F, A.rows + B.rows, A.cols + B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) C.at(i, j) = A.at(i, j);
  for (int i = 0; i < B.rows; ++i)
    for (int j = 0; j < B.cols; ++j) C.at(A.rows + i, A.cols + j) = B.at(i, j);
  return C;
}

Mat m_from_rows(const FieldPtr& F, const std::vector<Vec>& rows) {
  if (rows.empty()) return m_zero(F, 0, 0);
  Mat C = m_zero(F, static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) C.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
  return C;
}

Vec vec_add(const Vec& x, const Vec& y) {
  Vec z = x;
  for (size_t i = 0; i < z.size(); ++i) z[i] = v_add(z[i], y[i]);
  return z;
}
Vec vec_sub(const Vec& x, const Vec& y) {
  Vec z = x;
  for (size_t i = 0; i < z.size(); ++i) z[i] = v_sub(z[i], y[i]);
  return z;
}
Vec vec_scal(const Value& c, const Vec& x) {
  Vec z = x;
  for (auto& t : z) t = v_mul(c, t);
  return z;
}
bool vec_eq(const Vec& x, const Vec& y) {
  if (x.size() != y.size()) return false;
  for (size_t i = 0; i < x.size(); ++i)
    if (!v_eq(x[i], y[i])) return false;
  return true;
}
bool vec_is_zero(const Vec& x) {
  for (auto& t : x)
    if (!v_is_zero(t)) return false;
  return true;
}

std::string vec_str(const Vec& x) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i].str();
  os << ")";
  return os.str();
}

std::string Mat::str() const {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < rows; ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < cols; ++j) os << (j ? ", " : "") << at(i, j).str();
    os << "]";
  }
  os << "]";
  return os.str();
}

Vec vec_parse(const FieldPtr& F, const std::string& text) {
  std::string s = text;
  // strip optional outer parentheses/brackets
  auto strip = [&](char open, char close) {
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    if (b != std::string::npos && s[b] == open && s[e] == close) s = s.substr(b + 1, e - b - 1);
  };
  strip('(', ')');
  strip('[', ']');
  Vec out;
  size_t start = 0;
  int depth = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i < s.size() && (s[i] == '(' || s[i] == '[')) ++depth;
    if (i < s.size() && (s[i] == ')' || s[i] == ']')) --depth;
    if (i == s.size() || (s[i] == ',' && depth == 0)) {
      out.push_back(parse_value(F, s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

} // namespace qsb
