#include "ncc/io.hpp"

#include <fstream>
#include <sstream>

namespace ncc {

namespace {

Json complex_pair(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from(const Json& j, const char* where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw std::invalid_argument(std::string(where) + ": expected [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

const Json& field(const Json& j, const char* key, const char* where) {
    if (!j.is_object() || !j.contains(key))
        throw std::invalid_argument(std::string(where) + ": missing field '" + key + "'");
    return j.at(key);
}

int int_field(const Json& j, const char* key, const char* where) {
    const Json& v = field(j, key, where);
    if (!v.is_number_integer())
        throw std::invalid_argument(std::string(where) + ": field '" + key +
                                    "' must be an integer");
    return v.get<int>();
}

Json relation_name(OrderRelation r) {
    switch (r) {
        case OrderRelation::Dominates: return "dominates";
        case OrderRelation::Violated: return "violated";
        default: return "inconclusive";
    }
}

}  // namespace

Json to_json(const CMat& m) {
    Json data = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(complex_pair(m(i, j)));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMat mat_from_json(const Json& j) {
    const int rows = int_field(j, "rows", "matrix");
    const int cols = int_field(j, "cols", "matrix");
    const Json& data = field(j, "data", "matrix");
    if (rows < 0 || cols < 0 || !data.is_array() ||
        data.size() != static_cast<std::size_t>(rows) * cols)
        throw std::invalid_argument("matrix: data length does not match rows*cols");
    CMat m(rows, cols);
    std::size_t k = 0;
    for (int i = 0; i < rows; ++i)
        for (int c = 0; c < cols; ++c) m(i, c) = complex_from(data[k++], "matrix entry");
    return m;
}

Json to_json(const NcPoint& x) {
    Json mats = Json::array();
    for (const CMat& m : x.mats) mats.push_back(to_json(m));
    return Json{{"d", x.d}, {"level", x.level}, {"mats", std::move(mats)}};
}

NcPoint point_from_json(const Json& j) {
    const int d = int_field(j, "d", "point");
    const int level = int_field(j, "level", "point");
    const Json& mats = field(j, "mats", "point");
    if (!mats.is_array() || mats.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("point: expected d matrices");
    std::vector<CMat> ms;
    for (const Json& m : mats) {
        ms.push_back(mat_from_json(m));
        if (ms.back().rows() != level || ms.back().cols() != level)
            throw std::invalid_argument("point: matrix dimension does not match level");
    }
    return NcPoint(d, level, std::move(ms));
}

Json to_json(const NcSet& k) {
    if (const Pencil* p = k.pencil()) {
        Json coeffs = Json::array();
        for (const CMat& a : p->coeffs) coeffs.push_back(to_json(a));
        return Json{{"kind", "pencil"},
                    {"d", p->d},
                    {"hermitian", p->hermitian},
                    {"q", to_json(p->q)},
                    {"coeffs", std::move(coeffs)}};
    }
    if (const OpSysBasis* s = k.opsys()) {
        Json gens = Json::array();
        for (const CMat& g : s->gens) gens.push_back(to_json(g));
        return Json{{"kind", "opsys"}, {"d", s->d}, {"gens", std::move(gens)}};
    }
    const HullPresentation* h = k.hull();
    Json gens = Json::array();
    for (const NcPoint& g : h->generators) gens.push_back(to_json(g));
    return Json{{"kind", "hull"}, {"generators", std::move(gens)}};
}

NcSet set_from_json(const Json& j, const Tolerances& tol) {
    const Json& kind = field(j, "kind", "set");
    if (!kind.is_string()) throw std::invalid_argument("set: 'kind' must be a string");
    const std::string name = kind.get<std::string>();
    if (name == "interval") {
        if (!field(j, "c", "interval set").is_number() ||
            !field(j, "d", "interval set").is_number())
            throw std::invalid_argument("interval set: 'c' and 'd' must be numbers");
        return interval_set(j.at("c").get<double>(), j.at("d").get<double>());
    }
    if (name == "row_ball") return row_ball_set(int_field(j, "d", "row_ball set"));
    if (name == "pencil") {
        Pencil p;
        p.d = int_field(j, "d", "pencil set");
        const Json& herm = field(j, "hermitian", "pencil set");
        if (!herm.is_boolean())
            throw std::invalid_argument("pencil set: 'hermitian' must be a boolean");
        p.hermitian = herm.get<bool>();
        p.q = mat_from_json(field(j, "q", "pencil set"));
        for (const Json& a : field(j, "coeffs", "pencil set"))
            p.coeffs.push_back(mat_from_json(a));
        if (static_cast<int>(p.coeffs.size()) != p.num_coords())
            throw std::invalid_argument("pencil set: wrong number of coefficient matrices");
        return pencil_set(std::move(p), tol);
    }
    if (name == "opsys") {
        OpSysBasis s;
        s.d = int_field(j, "d", "opsys set");
        for (const Json& g : field(j, "gens", "opsys set")) s.gens.push_back(mat_from_json(g));
        if (static_cast<int>(s.gens.size()) != s.d)
            throw std::invalid_argument("opsys set: expected d generator matrices");
        s.ambient_dim = s.gens.empty() ? 0 : static_cast<int>(s.gens[0].rows());
        return opsys_set(std::move(s), tol);
    }
    if (name == "hull") {
        HullPresentation h;
        for (const Json& g : field(j, "generators", "hull set"))
            h.generators.push_back(point_from_json(g));
        return hull_set(std::move(h));
    }
    throw std::invalid_argument("set: unknown kind '" + name + "'");
}

std::string word_to_string(const Word& w) {
    std::string out;
    for (int l : w) {
        if (!out.empty()) out += ' ';
        if (l >= 0) {
            out += std::to_string(l + 1);
        } else {
            out += std::to_string(~l + 1);
            out += '*';
        }
    }
    return out;
}

Word word_from_string(const std::string& s, int d) {
    Word w;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        bool star = false;
        if (tok.back() == '*') {
            star = true;
            tok.pop_back();
        }
        int letter = 0;
        try {
            letter = std::stoi(tok);
        } catch (const std::exception&) {
            throw std::invalid_argument("word: bad letter token '" + tok + "'");
        }
        if (letter < 1 || letter > d)
            throw std::invalid_argument("word: letter " + tok + " out of range 1.." +
                                        std::to_string(d));
        w.push_back(star ? ~(letter - 1) : letter - 1);
    }
    return w;
}

Json to_json(const FreePoly& f) {
    Json terms = Json::array();
    for (const auto& [w, c] : f.terms)
        terms.push_back(Json{{"word", word_to_string(w)}, {"coeff", complex_pair(c)}});
    return Json{{"d", f.d}, {"terms", std::move(terms)}};
}

FreePoly poly_from_json(const Json& j) {
    const int d = int_field(j, "d", "polynomial");
    FreePoly f = FreePoly::zero(d);
    for (const Json& t : field(j, "terms", "polynomial")) {
        const Json& ws = field(t, "word", "polynomial term");
        if (!ws.is_string())
            throw std::invalid_argument("polynomial term: 'word' must be a string");
        Word w = word_from_string(ws.get<std::string>(), d);
        f.terms[w] += complex_from(field(t, "coeff", "polynomial term"), "polynomial coeff");
    }
    f.prune();
    return f;
}

Json to_json(const UcpRep& mu) {
    return Json{{"target_level", mu.target_level},
                {"point", to_json(mu.point)},
                {"isometry", to_json(mu.isometry)}};
}

UcpRep ucp_from_json(const Json& j) {
    UcpRep mu;
    mu.target_level = int_field(j, "target_level", "ucp map");
    mu.point = point_from_json(field(j, "point", "ucp map"));
    mu.isometry = mat_from_json(field(j, "isometry", "ucp map"));
    if (mu.isometry.rows() != mu.point.level || mu.isometry.cols() != mu.target_level)
        throw std::invalid_argument("ucp map: isometry shape must be level x target_level");
    if (max_abs(mu.isometry.adjoint() * mu.isometry -
                CMat::Identity(mu.target_level, mu.target_level)) > 1e-8)
        throw std::invalid_argument("ucp map: isometry* isometry must be the identity");
    return mu;
}

Json to_json(const MembershipResult& r) {
    Json j{{"inside", r.inside}, {"margin", r.margin}};
    if (r.witness) j["witness"] = to_json(*r.witness);
    return j;
}

Json to_json(const SeparationCertificate& c) {
    Json coeffs = Json::array();
    for (const CMat& b : c.functional.coeffs) coeffs.push_back(to_json(b));
    return Json{{"functional",
                 Json{{"n", c.functional.n},
                      {"const_term", to_json(c.functional.const_term)},
                      {"coeffs", std::move(coeffs)},
                      {"gamma", to_json(c.functional.gamma)}}},
                {"violation", c.violation},
                {"witness_vector", to_json(CMat(c.witness_vector))}};
}

Json to_json(const ClassifyReport& r) {
    Json j{{"euclidean_extreme_at_level", r.euclidean_extreme_at_level},
           {"irreducible", r.irreducible},
           {"maximal", r.maximal},
           {"nc_extreme", r.nc_extreme}};
    if (r.dilation) {
        j["dilation"] = Json{{"parent", to_json(r.dilation->parent)},
                             {"embedding", to_json(r.dilation->embedding)},
                             {"coupling_norm", r.dilation->coupling_norm}};
    }
    if (r.commutant_witness) j["commutant_witness"] = to_json(*r.commutant_witness);
    if (r.perturbation) j["perturbation"] = to_json(*r.perturbation);
    return j;
}

Json to_json(const DilateResult& r) {
    return Json{{"maximal", r.maximal},
                {"capped", !r.maximal},
                {"steps", r.steps},
                {"point", to_json(r.point)},
                {"embedding", to_json(r.embedding)}};
}

Json to_json(const KreinMilmanResult& r) {
    Json weights = Json::array();
    for (const auto& per_candidate : r.weights) {
        Json cols = Json::array();
        for (const CMat& a : per_candidate) cols.push_back(to_json(a));
        weights.push_back(std::move(cols));
    }
    return Json{{"representable", r.representable},
                {"gap", r.gap},
                {"weights", std::move(weights)}};
}

Json to_json(const EnvelopeResult& r) {
    return Json{{"point", to_json(r.point)},
                {"lower_bound", to_json(r.lower_bound)},
                {"upper_bound", to_json(r.upper_bound)},
                {"relaxation_level", r.relaxation_level},
                {"dilation_size", r.dilation_size}};
}

Json to_json(const OrderVerdict& v) {
    Json j{{"relation", relation_name(v.relation)}, {"gap", v.gap}};
    if (v.witness) j["witness"] = to_json(*v.witness);
    if (!v.tau_moments.empty()) {
        Json m = Json::array();
        for (const auto& [w, mat] : v.tau_moments)
            m.push_back(Json{{"word", word_to_string(w)}, {"value", to_json(mat)}});
        j["tau_moments"] = std::move(m);
    }
    return j;
}

Json to_json(const NcMeasure& m) {
    Json atoms = Json::array();
    for (const NcMeasureAtom& a : m.atoms)
        atoms.push_back(Json{{"point", to_json(a.point)}, {"weight", to_json(a.weight)}});
    return Json{{"target_level", m.target_level}, {"atoms", std::move(atoms)}};
}

Json to_json(const DecompositionReport& r, const std::vector<Json>& atom_flags) {
    Json j{{"capped", r.capped},
           {"all_atoms_irreducible", r.all_atoms_irreducible},
           {"all_atoms_maximal", r.all_atoms_maximal},
           {"supported_on_extreme", r.supported_on_extreme},
           {"measure", to_json(r.measure)}};
    if (!atom_flags.empty()) {
        if (atom_flags.size() != r.measure.atoms.size())
            throw std::invalid_argument("decomposition report: one flag object per atom");
        for (std::size_t i = 0; i < atom_flags.size(); ++i)
            j["measure"]["atoms"][i]["flags"] = atom_flags[i];
    }
    return j;
}

Json to_json(const ConvexityVerdict& v) {
    Json j{{"convex", v.convex}, {"level_checked", v.level_checked}};
    if (v.witness) {
        j["witness"] = Json{{"x", to_json(v.witness->x)},
                            {"y", to_json(v.witness->y)},
                            {"lambda", v.witness->lambda},
                            {"gap", v.witness->gap},
                            {"level", v.witness->level}};
    }
    return j;
}

Json to_json(const JensenReport& r) {
    return Json{{"passed", r.passed},
                {"max_violation", r.max_violation},
                {"instances", r.instances}};
}

Json to_json(const SemicircularReport& r) {
    return Json{{"lambda", complex_pair(r.lambda)},
                {"s2", r.s2},
                {"word_cap", r.word_cap},
                {"space_dim", r.space_dim},
                {"safe_dim", r.safe_dim},
                {"defect_norm", r.defect_norm},
                {"identity_residual", r.identity_residual}};
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    try {
        return Json::parse(in);
    } catch (const std::exception& e) {
        throw std::invalid_argument("parse error in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace ncc
