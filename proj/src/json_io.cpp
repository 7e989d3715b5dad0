#include "fc/json_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fc {

namespace {

using nlohmann::json;

long long to_int(const json& j, const std::string& field) {
    try {
        if (j.is_string()) return std::stoll(j.get<std::string>());
        if (j.is_number_integer()) return j.get<long long>();
    } catch (const std::exception&) {
    }
    throw SchemaError(field, "expected a decimal integer (as a string)");
}

json from_int(long long v) { return std::to_string(v); }

DocPoly parse_poly(const json& j, const std::string& field) {
    if (!j.is_array()) throw SchemaError(field, "expected a list of [degree, coefficient] pairs");
    DocPoly p;
    for (size_t k = 0; k < j.size(); ++k) {
        const json& t = j[k];
        std::string f = field + "[" + std::to_string(k) + "]";
        if (!t.is_array() || t.size() != 2) throw SchemaError(f, "expected [degree, coefficient]");
        p.terms.emplace_back(int(to_int(t[0], f)), std::to_string(to_int(t[1], f)));
    }
    return p;
}

json dump_poly(const DocPoly& p) {
    json j = json::array();
    for (auto& [deg, c] : p.terms) j.push_back(json::array({from_int(deg), c}));
    return j;
}

DocScalar parse_scalar(const json& j, const std::string& field) {
    if (!j.is_object() || !j.contains("val") || !j.contains("unit"))
        throw SchemaError(field, "expected {val, unit}");
    DocScalar s;
    s.val = int(to_int(j.at("val"), field + ".val"));
    const json& u = j.at("unit");
    if (!u.is_array()) throw SchemaError(field + ".unit", "expected a coordinate list");
    for (size_t k = 0; k < u.size(); ++k)
        s.unit.push_back(std::to_string(to_int(u[k], field + ".unit")));
    return s;
}

json dump_scalar(const DocScalar& s) {
    json u = json::array();
    for (auto& c : s.unit) u.push_back(c);
    return json{{"val", from_int(s.val)}, {"unit", u}};
}

template <class T, class F>
std::vector<std::vector<T>> parse_matrix(const json& j, const std::string& field, int rank, F cell) {
    if (!j.is_array() || int(j.size()) != rank)
        throw SchemaError(field, "expected " + std::to_string(rank) + " rows");
    std::vector<std::vector<T>> m;
    for (size_t i = 0; i < j.size(); ++i) {
        const json& row = j[i];
        std::string f = field + "[" + std::to_string(i) + "]";
        if (!row.is_array() || int(row.size()) != rank)
            throw SchemaError(f, "expected " + std::to_string(rank) + " entries");
        std::vector<T> r;
        for (size_t k = 0; k < row.size(); ++k)
            r.push_back(cell(row[k], f + "[" + std::to_string(k) + "]"));
        m.push_back(std::move(r));
    }
    return m;
}

long long coeff_of(const std::string& s, const std::string& field) {
    try {
        return std::stoll(s);
    } catch (const std::exception&) {
        throw SchemaError(field, "bad coefficient '" + s + "'");
    }
}

}  // namespace

CrystalDocument parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("(document)", e.what());
    }
    if (!j.is_object()) throw SchemaError("(document)", "expected an object");
    CrystalDocument doc;
    doc.schema = int(to_int(j.value("schema", json("1")), "schema"));
    if (doc.schema != 1) throw SchemaError("schema", "unsupported schema version");
    doc.name = j.value("name", "");
    if (!j.contains("p")) throw SchemaError("p", "missing");
    doc.p = to_int(j.at("p"), "p");
    if (doc.p < 2) throw SchemaError("p", "must be a prime >= 2");
    doc.d = int(to_int(j.value("d", json("1")), "d"));
    if (doc.d < 1) throw SchemaError("d", "must be >= 1");
    if (!j.contains("precision")) throw SchemaError("precision", "missing");
    doc.precision = int(to_int(j.at("precision"), "precision"));
    if (doc.precision < 2) throw SchemaError("precision", "must be >= 2");
    doc.base = j.value("base", "point");
    if (doc.base != "point" && doc.base != "affine_line" && doc.base != "torus")
        throw SchemaError("base", "expected point | affine_line | torus");
    if (!j.contains("rank")) throw SchemaError("rank", "missing");
    doc.rank = int(to_int(j.at("rank"), "rank"));
    if (doc.rank < 1) throw SchemaError("rank", "must be >= 1");
    doc.rho = int(to_int(j.value("rho", json("0")), "rho"));
    if (!j.contains("phi")) throw SchemaError("phi", "missing");
    if (doc.base == "point") {
        if (doc.d < 1) throw SchemaError("d", "must be >= 1");
        doc.phi_point = parse_matrix<DocScalar>(j.at("phi"), "phi", doc.rank, parse_scalar);
        if (j.contains("nabla")) throw SchemaError("nabla", "not allowed for base = point");
        if (j.contains("degree_window"))
            throw SchemaError("degree_window", "not allowed for base = point");
        if (j.contains("frobenius_lift"))
            throw SchemaError("frobenius_lift", "not allowed for base = point");
    } else {
        if (doc.d != 1) throw SchemaError("d", "must be 1 over an affine base");
        if (!j.contains("degree_window")) throw SchemaError("degree_window", "missing");
        doc.degree_window = int(to_int(j.at("degree_window"), "degree_window"));
        if (doc.degree_window < 1) throw SchemaError("degree_window", "must be >= 1");
        doc.phi_poly = parse_matrix<DocPoly>(j.at("phi"), "phi", doc.rank, parse_poly);
        if (!j.contains("nabla")) throw SchemaError("nabla", "required for an affine base");
        doc.nabla = parse_matrix<DocPoly>(j.at("nabla"), "nabla", doc.rank, parse_poly);
        if (j.contains("frobenius_lift"))
            doc.frobenius_lift = parse_poly(j.at("frobenius_lift"), "frobenius_lift");
        int wlo = doc.base == "torus" ? -doc.degree_window : 0, whi = doc.degree_window;
        auto check_window = [&](const DocPoly& poly, const std::string& field) {
            for (auto& [deg, c] : poly.terms)
                if (deg < wlo || deg > whi)
                    throw SchemaError(field, "term degree " + std::to_string(deg) +
                                                 " outside the window [" + std::to_string(wlo) +
                                                 ", " + std::to_string(whi) + "]");
        };
        for (auto& row : doc.phi_poly)
            for (auto& poly : row) check_window(poly, "phi");
        for (auto& row : doc.nabla)
            for (auto& poly : row) check_window(poly, "nabla");
        if (doc.frobenius_lift) check_window(*doc.frobenius_lift, "frobenius_lift");
    }
    return doc;
}

std::string serialize_document(const CrystalDocument& doc) {
    json j;
    j["schema"] = from_int(doc.schema);
    if (!doc.name.empty()) j["name"] = doc.name;
    j["p"] = from_int(doc.p);
    j["d"] = from_int(doc.d);
    j["precision"] = from_int(doc.precision);
    j["base"] = doc.base;
    j["rank"] = from_int(doc.rank);
    if (doc.rho != 0) j["rho"] = from_int(doc.rho);
    if (doc.base == "point") {
        json m = json::array();
        for (auto& row : doc.phi_point) {
            json r = json::array();
            for (auto& s : row) r.push_back(dump_scalar(s));
            m.push_back(r);
        }
        j["phi"] = m;
    } else {
        j["degree_window"] = from_int(doc.degree_window);
        auto dump_mat = [](const std::vector<std::vector<DocPoly>>& m) {
            json out = json::array();
            for (auto& row : m) {
                json r = json::array();
                for (auto& p : row) r.push_back(dump_poly(p));
                out.push_back(r);
            }
            return out;
        };
        j["phi"] = dump_mat(doc.phi_poly);
        j["nabla"] = dump_mat(doc.nabla);
        if (doc.frobenius_lift) j["frobenius_lift"] = dump_poly(*doc.frobenius_lift);
    }
    return j.dump(2) + "\n";
}

CrystalDocument load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError(path, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_document(ss.str());
    } catch (const SchemaError& e) {
        throw SchemaError(path + ":" + e.field, e.msg);
    }
}

PointHandle document_point(const CrystalDocument& doc, int precision_override) {
    if (doc.base != "point") throw SchemaError("base", "point crystal expected");
    int N = precision_override > 0 ? precision_override : doc.precision;
    auto R = WittRing::make(u64(doc.p), doc.d, N);
    // clear negative entry valuations into the global twist
    int shift = 0;
    for (auto& row : doc.phi_point)
        for (auto& s : row) shift = std::max(shift, -s.val);
    Mat P(R.get(), doc.rank, doc.rank);
    for (int i = 0; i < doc.rank; ++i)
        for (int k = 0; k < doc.rank; ++k) {
            const DocScalar& s = doc.phi_point[size_t(i)][size_t(k)];
            if (int(s.unit.size()) > doc.d) throw SchemaError("phi", "unit has more than d coordinates");
            WittElem u = WittElem::zero(R.get());
            for (size_t c = 0; c < s.unit.size(); ++c) {
                long long v = coeff_of(s.unit[c], "phi.unit");
                u.c[c] = R->z.add(u64(((v % (long long)R->z.q) + (long long)R->z.q)) % R->z.q, 0);
            }
            P.at(i, k) = u.mulp(s.val + shift);
        }
    return {R, FCrystalPoint::make(R.get(), P, doc.rho + shift)};
}

LiftedCrystal document_lifted(const CrystalDocument& doc, int precision_override,
                              int window_override) {
    if (doc.base == "point") throw SchemaError("base", "affine-base crystal expected");
    int N = precision_override > 0 ? precision_override : doc.precision;
    int M = window_override > 0 ? window_override : doc.degree_window;
    std::vector<std::pair<int, long long>> g;
    if (doc.frobenius_lift)
        for (auto& [deg, c] : doc.frobenius_lift->terms)
            g.emplace_back(deg, coeff_of(c, "frobenius_lift"));
    auto base = AffineBase::make(doc.base == "torus" ? AffineBase::torus : AffineBase::affine_line,
                                 u64(doc.p), N, M, g);
    auto mat_of = [&](const std::vector<std::vector<DocPoly>>& m, const std::string& field) {
        RMat A(base.get(), doc.rank, doc.rank);
        for (int i = 0; i < doc.rank; ++i)
            for (int k = 0; k < doc.rank; ++k) {
                RingElem e = RingElem::zero(base.get());
                for (auto& [deg, c] : m[size_t(i)][size_t(k)].terms) {
                    if (deg < base->lo() || deg > base->hi())
                        throw SchemaError(field, "term degree outside the window");
                    long long v = coeff_of(c, field);
                    u64 q = base->z.q;
                    e.set(deg, u64(((v % (long long)q) + (long long)q)) % q);
                }
                A.at(i, k) = e;
            }
        return A;
    };
    return LiftedCrystal::make(base, mat_of(doc.phi_poly, "phi"), doc.rho,
                               mat_of(doc.nabla, "nabla"));
}

}  // namespace fc
