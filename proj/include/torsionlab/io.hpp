#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "builtin_models.hpp"
#include "curvature.hpp"
#include "form.hpp"
#include "g1_calculus.hpp"
#include "homogeneous.hpp"
#include "nk_holonomy.hpp"

namespace torsionlab {

using json = nlohmann::ordered_json;

/// Round to 12 significant digits so serialized numbers are byte-stable
/// across runs and platforms.
inline double round12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(round12(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix: expected array of rows");
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  }
  return m;
}

/// Form schema: {degree, terms: [{idx: [i1 < ... < ip], c}]}, indices 1-based.
inline json form_to_json(const Form& f) {
  json terms = json::array();
  for (auto& [mask, c] : f.terms()) {
    json idx = json::array();
    for (int i : mask_indices(mask)) idx.push_back(i + 1);
    terms.push_back(json{{"idx", std::move(idx)}, {"c", round12(c)}});
  }
  return json{{"degree", f.degree()}, {"terms", std::move(terms)}};
}

inline Form form_from_json(int dim, const json& j) {
  Form f(dim, j.at("degree").get<int>());
  for (auto& t : j.at("terms")) {
    std::vector<int> idx;
    for (auto& i : t.at("idx")) {
      int v = i.get<int>();
      if (v < 1 || v > dim) throw std::invalid_argument("form: index out of range");
      idx.push_back(v - 1);
    }
    if (static_cast<int>(idx.size()) != f.degree())
      throw std::invalid_argument("form: term arity does not match degree");
    for (size_t k = 1; k < idx.size(); ++k)
      if (idx[k] <= idx[k - 1]) throw std::invalid_argument("form: indices must be ascending");
    f.set(indices_mask(idx), f.coeff(indices_mask(idx)) + t.at("c").get<double>());
  }
  return f;
}

/// Space schema: {dim, J: row-major matrix, metric?: row-major matrix}.
/// The frame is always orthonormal and J-standard in this library, so the
/// matrices are emitted for the record and checked on input.
inline json space_to_json(int dim) {
  return json{{"dim", dim}, {"J", matrix_to_json(standard_J(dim))}};
}

inline int space_from_json(const json& j) {
  int dim = j.at("dim").get<int>();
  if (dim < 4 || dim % 2 != 0) throw std::invalid_argument("space: dim must be even, >= 4");
  if (j.contains("J") && (matrix_from_json(j["J"]) - standard_J(dim)).norm() > 1e-12)
    throw std::invalid_argument("space: J must be the standard block structure");
  if (j.contains("metric") &&
      (matrix_from_json(j["metric"]) - Eigen::MatrixXd::Identity(dim, dim)).norm() > 1e-12)
    throw std::invalid_argument("space: metric must be the identity in this frame");
  return dim;
}

/// Model schema: {name?, dim_m, dim_h, basis_labels, brackets: [{i,j,k,c}],
/// metric?, J}; bracket indices are 0-based into the basis_labels array and
/// emitted only for i < j with c != 0.
inline json model_to_json(const HomogeneousModel& model) {
  json brackets = json::array();
  int n = model.dim_g();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (model.c3(i, j, k) != 0.0)
          brackets.push_back(
              json{{"i", i}, {"j", j}, {"k", k}, {"c", round12(model.c3(i, j, k))}});
  return json{{"name", model.name()},
              {"dim_m", model.dim_m()},
              {"dim_h", model.dim_h()},
              {"basis_labels", model.basis_labels()},
              {"brackets", std::move(brackets)},
              {"J", matrix_to_json(standard_J(model.dim_m()))}};
}

inline HomogeneousModel model_from_json(const json& j) {
  HomogeneousModel model(j.value("name", std::string("model")), j.at("dim_m").get<int>(),
                         j.at("dim_h").get<int>());
  if (j.contains("basis_labels")) {
    auto labels = j["basis_labels"].get<std::vector<std::string>>();
    if (static_cast<int>(labels.size()) != model.dim_g())
      throw std::invalid_argument("model: basis_labels size must equal dim_m + dim_h");
    model.basis_labels() = labels;
  }
  if (j.contains("J") &&
      (matrix_from_json(j["J"]) - standard_J(model.dim_m())).norm() > 1e-12)
    throw std::invalid_argument("model: J must be the standard block structure");
  int n = model.dim_g();
  for (auto& b : j.at("brackets")) {
    int i = b.at("i").get<int>(), jj = b.at("j").get<int>(), k = b.at("k").get<int>();
    if (i < 0 || jj < 0 || k < 0 || i >= n || jj >= n || k >= n)
      throw std::invalid_argument("model: bracket index out of range");
    model.set_c3(i, jj, k, b.at("c").get<double>());
  }
  model.validate();
  return model;
}

/// Curvature schema: {dim, values: nested [d][d][d][d] array}.
inline json curvature_to_json(const CurvatureLike& R) {
  int d = R.dim();
  json values = json::array();
  for (int i = 0; i < d; ++i) {
    json a = json::array();
    for (int j = 0; j < d; ++j) {
      json b = json::array();
      for (int k = 0; k < d; ++k) {
        json c = json::array();
        for (int l = 0; l < d; ++l) c.push_back(round12(R(i, j, k, l)));
        b.push_back(std::move(c));
      }
      a.push_back(std::move(b));
    }
    values.push_back(std::move(a));
  }
  return json{{"dim", d}, {"values", std::move(values)}};
}

inline CurvatureLike curvature_from_json(const json& j) {
  int d = j.at("dim").get<int>();
  CurvatureLike R(d);
  const json& v = j.at("values");
  for (int i = 0; i < d; ++i)
    for (int jj = 0; jj < d; ++jj)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) {
          double c = v.at(i).at(jj).at(k).at(l).get<double>();
          if (i < jj && k < l && c != 0.0) R.set(i, jj, k, l, c);
        }
  return R;
}

/// Holonomy system schema: {space, psi_plus, R}; build_system revalidates.
inline json system_to_json(const HolonomySystem& sys) {
  return json{{"space", space_to_json(sys.dim)},
              {"psi_plus", form_to_json(sys.psi_plus)},
              {"R", curvature_to_json(sys.R)}};
}

inline HolonomySystem system_from_json(const json& j, double tol = 1e-8) {
  int dim = space_from_json(j.at("space"));
  Form psi = form_from_json(dim, j.at("psi_plus"));
  CurvatureLike R = curvature_from_json(j.at("R"));
  if (R.dim() != dim) throw std::invalid_argument("system: curvature dimension mismatch");
  return build_system(psi, R, tol);
}

/// Report schema: {suite, items: [{name, anchor, residual, pass}]}.
inline json report_to_json(const ResidualReport& rep) {
  json items = json::array();
  for (auto& it : rep.items)
    items.push_back(json{{"name", it.name},
                         {"anchor", it.anchor},
                         {"residual", round12(it.residual)},
                         {"pass", it.pass || !it.gated}});
  return json{{"suite", rep.suite}, {"items", std::move(items)}};
}

/// One line per identity: name, anchor, residual, PASS/FAIL, input order.
inline std::string report_render(const json& rep) {
  if (!rep.contains("suite") || !rep.contains("items"))
    throw std::invalid_argument("report: expected {suite, items}");
  std::ostringstream out;
  out << "suite: " << rep["suite"].get<std::string>() << "\n";
  for (auto& it : rep["items"]) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", it.at("residual").get<double>());
    out << (it.at("pass").get<bool>() ? "PASS" : "FAIL") << "  "
        << it.at("name").get<std::string>() << "  residual=" << buf << "  ["
        << it.at("anchor").get<std::string>() << "]\n";
  }
  return out.str();
}

inline json subspace_record_to_json(const SubspaceRecord& rec) {
  return json{{"kind", to_string(rec.kind)},
              {"basis", matrix_to_json(rec.basis)},
              {"residual_J", round12(rec.residual_J)},
              {"residual_h", round12(rec.residual_h)},
              {"residual_null", round12(rec.residual_null)},
              {"residual_isotropic", round12(rec.residual_isotropic)},
              {"residual_contain", round12(rec.residual_contain)},
              {"onto_gap", round12(rec.onto_gap)}};
}

/// Factorization tree: nested {dim, embedding, leaf, leaf_kind?, special?,
/// split_residual?, children?} with the per-node certificates inline.
inline json tree_to_json(const ReductionNode& node) {
  json out{{"dim", node.sys.dim}, {"embedding", matrix_to_json(node.embedding)},
           {"leaf", node.leaf}};
  if (node.leaf) {
    out["leaf_kind"] = node.leaf_kind;
    if (node.leaf_kind == "special") out["special"] = subspace_record_to_json(node.special);
  } else {
    out["split_residual"] = round12(node.split_residual);
    json children = json::array();
    for (auto& c : node.children) children.push_back(tree_to_json(c));
    out["children"] = std::move(children);
  }
  return out;
}

inline std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open input file: " + path);
  return json::parse(in);  // parse_error carries byte position
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot open output file: " + path);
  out << text;
}

}  // namespace torsionlab
