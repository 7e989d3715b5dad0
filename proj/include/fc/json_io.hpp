#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fc/fcrystal.hpp"
#include "fc/lifted.hpp"

namespace fc {

/// Input document problem, with the offending field path for diagnostics.
struct SchemaError : std::runtime_error {
    std::string field, msg;
    SchemaError(const std::string& fld, const std::string& m)
        : std::runtime_error(fld + ": " + m), field(fld), msg(m) {}
};

/// Polynomial given by (degree, decimal-string coefficient) terms.
struct DocPoly {
    std::vector<std::pair<int, std::string>> terms;
    bool operator==(const DocPoly& o) const = default;
};

/// Point matrix entry p^val * unit, unit in Witt power-basis coordinates.
struct DocScalar {
    int val = 0;
    std::vector<std::string> unit;
    bool operator==(const DocScalar& o) const = default;
};

/// On-disk description of a crystal; all numeric leaves serialize as decimal
/// strings.  phi is a point-scalar matrix when base = "point" and a polynomial
/// matrix otherwise; nabla/degree_window are required exactly for the latter.
struct CrystalDocument {
    int schema = 1;
    std::string name;
    long long p = 2;
    int d = 1;
    int precision = 8;
    std::string base = "point";  // point | affine_line | torus
    int degree_window = 0;
    int rank = 1;
    int rho = 0;
    std::vector<std::vector<DocScalar>> phi_point;
    std::vector<std::vector<DocPoly>> phi_poly;
    std::vector<std::vector<DocPoly>> nabla;
    std::optional<DocPoly> frobenius_lift;
    bool operator==(const CrystalDocument& o) const = default;
};

CrystalDocument parse_document(const std::string& text);
std::string serialize_document(const CrystalDocument& doc);
/// Reads and parses; SchemaError fields are prefixed with the file name.
CrystalDocument load_document(const std::string& path);

/// Realize a point document (keeps the ring alive).
struct PointHandle {
    WittRingPtr R;
    FCrystalPoint D;
};
PointHandle document_point(const CrystalDocument& doc, int precision_override = 0);

/// Realize a lifted document (the crystal keeps the base alive).
LiftedCrystal document_lifted(const CrystalDocument& doc, int precision_override = 0,
                              int window_override = 0);

}  // namespace fc
