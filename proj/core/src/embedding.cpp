#include "eed/embedding.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eed {

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::Lpca: return "lpca";
    case ModelKind::Eig: return "eig";
    case ModelKind::L2: return "l2";
  }
  throw std::logic_error("unknown model kind");
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "lpca") return ModelKind::Lpca;
  if (s == "eig") return ModelKind::Eig;
  if (s == "l2") return ModelKind::L2;
  throw std::invalid_argument("unknown model '" + s +
                              "' (expected lpca, eig, or l2)");
}

double Embedding::logit(int i, int j) const {
  switch (model) {
    case ModelKind::Lpca:
      return x.row(i).dot(y.row(j));
    case ModelKind::Eig:
      return bias + x.row(i).dot(y.row(j));
    case ModelKind::L2:
      return bias - row_distance(x, i, y, j);
  }
  throw std::logic_error("unknown model kind");
}

Embedding lpca_from_l2(const Embedding& e) {
  if (e.model != ModelKind::L2) {
    throw std::invalid_argument("lpca_from_l2 expects an l2 embedding");
  }
  if (e.bias < 0.0) {
    throw std::invalid_argument("l2 bias must be nonnegative");
  }
  const int n = e.num_nodes();
  const int d = e.dim();

  // <x', y'> = (b^2 - |x|^2) + (-|y|^2) + 2<x, y> = b^2 - |x - y|^2, which
  // has the sign of b - |x - y| because b + |x - y| >= 0, with equality
  // only when both sides are zero.
  Embedding out;
  out.model = ModelKind::Lpca;
  out.bias = 0.0;
  out.x.resize(n, d + 2);
  out.y.resize(n, d + 2);
  const double b2 = e.bias * e.bias;
  for (int i = 0; i < n; ++i) {
    out.x(i, 0) = b2 - e.x.row(i).squaredNorm();
    out.x(i, 1) = 1.0;
    out.x.row(i).tail(d) = e.x.row(i);
    out.y(i, 0) = 1.0;
    out.y(i, 1) = -e.y.row(i).squaredNorm();
    out.y.row(i).tail(d) = 2.0 * e.y.row(i);
  }
  return out;
}

Embedding l2_from_lpca(const Embedding& e) {
  Embedding base = e.model == ModelKind::Eig ? lpca_from_eig(e) : e;
  if (base.model != ModelKind::Lpca) {
    throw std::invalid_argument("l2_from_lpca expects an lpca or eig embedding");
  }
  const int n = base.num_nodes();

  // After row normalization, sqrt(2) - |x - y| has the sign of
  // 2 - |x - y|^2 = 2 <x, y>, so predictions are preserved exactly.
  Embedding out;
  out.model = ModelKind::L2;
  out.bias = std::sqrt(2.0);
  out.x = base.x;
  out.y = base.y;
  for (int i = 0; i < n; ++i) {
    const double nx = out.x.row(i).norm();
    const double ny = out.y.row(i).norm();
    if (nx == 0.0) {
      throw std::invalid_argument("cannot normalize zero x row " +
                                  std::to_string(i));
    }
    if (ny == 0.0) {
      throw std::invalid_argument("cannot normalize zero y row " +
                                  std::to_string(i));
    }
    out.x.row(i) /= nx;
    out.y.row(i) /= ny;
  }
  return out;
}

Embedding eig_from_lpca(const Embedding& e) {
  if (e.model != ModelKind::Lpca) {
    throw std::invalid_argument("eig_from_lpca expects an lpca embedding");
  }
  Embedding out = e;
  out.model = ModelKind::Eig;
  out.bias = 0.0;
  return out;
}

Embedding lpca_from_eig(const Embedding& e) {
  if (e.model != ModelKind::Eig) {
    throw std::invalid_argument("lpca_from_eig expects an eig embedding");
  }
  const int n = e.num_nodes();
  const int d = e.dim();
  Embedding out;
  out.model = ModelKind::Lpca;
  out.bias = 0.0;
  out.x.resize(n, d + 1);
  out.y.resize(n, d + 1);
  out.x.col(0).setConstant(e.bias);
  out.x.rightCols(d) = e.x;
  out.y.col(0).setOnes();
  out.y.rightCols(d) = e.y;
  return out;
}

namespace {

void write_row(std::ofstream& out, const Eigen::MatrixXd& m, int row) {
  char buf[64];
  for (int k = 0; k < m.cols(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", m(row, k));
    out << (k ? " " : "") << buf;
  }
  out << '\n';
}

}  // namespace

void save_embedding(const Embedding& e, const std::string& path) {
  if (e.model == ModelKind::L2 && e.bias < 0.0) {
    throw std::runtime_error("l2 bias must be nonnegative");
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "EED1 " << to_string(e.model) << ' ' << e.num_nodes() << ' '
      << e.dim() << ' ';
  if (e.has_bias()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", e.bias);
    out << buf << '\n';
  } else {
    out << "NA\n";
  }
  for (int i = 0; i < e.num_nodes(); ++i) write_row(out, e.x, i);
  for (int i = 0; i < e.num_nodes(); ++i) write_row(out, e.y, i);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Embedding load_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding: " + path);

  std::string magic, model, bias_tok;
  long long n = 0, d = 0;
  if (!(in >> magic >> model >> n >> d >> bias_tok)) {
    throw std::runtime_error(path + ": truncated header");
  }
  if (magic != "EED1") {
    throw std::runtime_error(path + ": unsupported format version '" + magic +
                             "' (expected EED1)");
  }
  if (n < 1 || d < 1) {
    throw std::runtime_error(path + ": invalid dimensions in header");
  }

  Embedding e;
  e.model = model_kind_from_string(model);
  if (bias_tok == "NA") {
    if (e.model != ModelKind::Lpca) {
      throw std::runtime_error(path + ": model " + model + " requires a bias");
    }
    e.bias = 0.0;
  } else {
    e.bias = std::stod(bias_tok);
    if (e.model == ModelKind::L2 && e.bias < 0.0) {
      throw std::runtime_error(path + ": l2 bias must be nonnegative");
    }
  }
  e.x.resize(n, d);
  e.y.resize(n, d);
  for (auto* m : {&e.x, &e.y}) {
    for (long long i = 0; i < n; ++i) {
      for (long long k = 0; k < d; ++k) {
        if (!(in >> (*m)(i, k))) {
          throw std::runtime_error(path + ": truncated embedding data");
        }
      }
    }
  }
  return e;
}

}  // namespace eed
