#include "geo4/json_io.hpp"

#include <limits>

namespace geo4 {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void bad(const std::string& path, const std::string& what)
{
    throw Error(ErrorKind::InvalidDescriptor, path + ": " + what, path);
}

const Json& field(const Json& obj, const char* key, const std::string& path)
{
    if (!obj.is_object()) bad(path, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) bad(path.empty() ? std::string(key) : path + "." + key, "missing field");
    return *it;
}

const Json* optional_field(const Json& obj, const char* key)
{
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

int small_int(const Json& j, const std::string& path)
{
    const Int v = int_from_json(j, path);
    if (v < 0 || v > 1000000) bad(path, "out of range");
    return static_cast<int>(v);
}

IntPair pair_from_json(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2) bad(path, "expected an array of two integers");
    return {int_from_json(j[0], path + "[0]"), int_from_json(j[1], path + "[1]")};
}

Json pair_json(const IntPair& p)
{
    return Json::array({int_json(p[0]), int_json(p[1])});
}

Json ints_json(const std::vector<Int>& v)
{
    Json a = Json::array();
    for (const auto& x : v) a.push_back(int_json(x));
    return a;
}

FactorKind factor_kind_from(const std::string& s, const std::string& path)
{
    for (FactorKind k : {FactorKind::Surface, FactorKind::Torus2, FactorKind::Circle, FactorKind::Sphere2,
                         FactorKind::Hyperbolic3})
        if (s == factor_kind_name(k)) return k;
    bad(path, "unknown factor kind '" + s + "'");
}

OpaqueGeometry opaque_from(const std::string& s, const std::string& path)
{
    for (OpaqueGeometry g : {OpaqueGeometry::H4, OpaqueGeometry::H2C, OpaqueGeometry::H2xH2Irreducible,
                             OpaqueGeometry::S4, OpaqueGeometry::CP2, OpaqueGeometry::S2xS2})
        if (s == opaque_geometry_name(g)) return g;
    bad(path, "unknown geometry '" + s + "'");
}

std::string string_from(const Json& j, const std::string& path)
{
    if (!j.is_string()) bad(path, "expected a string");
    return j.get<std::string>();
}

Json factor_json(const Factor& f)
{
    Json j{{"kind", factor_kind_name(f.kind)}};
    if (f.kind == FactorKind::Surface) j["genus"] = f.genus;
    if (f.kind == FactorKind::Hyperbolic3) j["tag"] = f.tag;
    return j;
}

Factor factor_from(const Json& j, const std::string& path)
{
    Factor f;
    f.kind = factor_kind_from(string_from(field(j, "kind", path), path + ".kind"), path + ".kind");
    if (f.kind == FactorKind::Surface) f.genus = small_int(field(j, "genus", path), path + ".genus");
    if (f.kind == FactorKind::Hyperbolic3)
        if (const Json* t = optional_field(j, "tag")) f.tag = string_from(*t, path + ".tag");
    return f;
}

} // namespace

Json int_json(const Int& v)
{
    if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max())
        return static_cast<std::int64_t>(v);
    return v.str();
}

Json rational_json(const Rational& v)
{
    return to_string(v);
}

Json matrix_json(const IntMatrix& m)
{
    Json rows = Json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(int_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Int int_from_json(const Json& j, const std::string& path)
{
    if (j.is_number_integer()) return j.is_number_unsigned() ? Int(j.get<std::uint64_t>()) : Int(j.get<std::int64_t>());
    if (j.is_string()) {
        const Rational r = [&] {
            try {
                return parse_rational(j.get<std::string>());
            } catch (const Error&) {
                bad(path, "expected an integer");
            }
        }();
        if (boost::multiprecision::denominator(r) != 1) bad(path, "expected an integer");
        return boost::multiprecision::numerator(r);
    }
    bad(path, "expected an integer");
}

Rational rational_from_json(const Json& j, const std::string& path)
{
    if (j.is_number_integer()) return Rational(int_from_json(j, path));
    if (!j.is_string()) bad(path, "expected a rational \"p/q\"");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const Error&) {
        bad(path, "expected a rational \"p/q\"");
    }
}

IntMatrix matrix_from_json(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array of rows");
    const std::size_t n = j.size();
    IntMatrix m;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array()) bad(rp, "expected an array of integers");
        if (i == 0) m = IntMatrix(n, j[0].size());
        if (j[i].size() != m.cols()) bad(rp, "rows have different lengths");
        for (std::size_t k = 0; k < j[i].size(); ++k) m(i, k) = int_from_json(j[i][k], rp + "[" + std::to_string(k) + "]");
    }
    return m;
}

Json descriptor_json(const LatticeDescriptor& d)
{
    Json payload = std::visit(
        overloaded{
            [](const TorusBundle4& t) { return Json{{"matrix", matrix_json(t.a)}}; },
            [](const GammaQLattice& g) { return Json{{"q", int_json(g.q)}}; },
            [](const GammaQExtension& g) {
                return Json{{"q", int_json(g.q)}, {"c", matrix_json(g.c)}, {"mu", pair_json(g.mu)}};
            },
            [](const T2BundleOverT2& t) {
                return Json{{"a", matrix_json(t.a)}, {"b", matrix_json(t.b)}, {"obstruction", pair_json(t.obstruction)}};
            },
            [](const SeifertInvariants& s) {
                Json mons = Json::array();
                for (const auto& m : s.monodromies) mons.push_back(matrix_json(m));
                Json cones = Json::array();
                for (const auto& c : s.cone_points) cones.push_back({{"m", int_json(c.m)}, {"a", int_json(c.a)}, {"b", int_json(c.b)}});
                return Json{{"baseOrientable", s.base_orientable}, {"genus", s.genus}, {"monodromies", mons},
                            {"conePoints", cones}, {"obstruction", pair_json(s.obstruction)}};
            },
            [](const ProductLattice& p) { return Json{{"first", factor_json(p.first)}, {"second", factor_json(p.second)}}; },
            [](const OpaqueLattice& o) { return Json{{"geometry", opaque_geometry_name(o.geometry)}, {"tag", o.tag}}; },
        },
        d);
    return Json{{"schemaVersion", kSchemaVersion}, {"kind", kind_name(d)}, {"payload", std::move(payload)}};
}

LatticeDescriptor descriptor_from_json(const Json& j)
{
    if (!j.is_object()) bad("$", "expected a descriptor object");
    const std::string version = string_from(field(j, "schemaVersion", ""), "schemaVersion");
    if (version != kSchemaVersion) bad("schemaVersion", "unsupported version '" + version + "', expected \"1\"");
    const std::string kind = string_from(field(j, "kind", ""), "kind");
    const Json& p = field(j, "payload", "");
    if (!p.is_object()) bad("payload", "expected an object");

    LatticeDescriptor d;
    if (kind == "torus_bundle_4") {
        d = TorusBundle4{matrix_from_json(field(p, "matrix", "payload"), "payload.matrix")};
    } else if (kind == "gamma_q") {
        d = GammaQLattice{int_from_json(field(p, "q", "payload"), "payload.q")};
    } else if (kind == "gamma_q_extension") {
        d = GammaQExtension{int_from_json(field(p, "q", "payload"), "payload.q"),
                            matrix_from_json(field(p, "c", "payload"), "payload.c"),
                            pair_from_json(field(p, "mu", "payload"), "payload.mu")};
    } else if (kind == "t2_bundle_over_t2") {
        d = T2BundleOverT2{matrix_from_json(field(p, "a", "payload"), "payload.a"),
                           matrix_from_json(field(p, "b", "payload"), "payload.b"),
                           pair_from_json(field(p, "obstruction", "payload"), "payload.obstruction")};
    } else if (kind == "seifert") {
        SeifertInvariants s;
        if (const Json* o = optional_field(p, "baseOrientable")) {
            if (!o->is_boolean()) bad("payload.baseOrientable", "expected a boolean");
            s.base_orientable = o->get<bool>();
        }
        s.genus = small_int(field(p, "genus", "payload"), "payload.genus");
        if (const Json* m = optional_field(p, "monodromies")) {
            if (!m->is_array()) bad("payload.monodromies", "expected an array of matrices");
            for (std::size_t i = 0; i < m->size(); ++i)
                s.monodromies.push_back(matrix_from_json((*m)[i], "payload.monodromies[" + std::to_string(i) + "]"));
        }
        if (const Json* c = optional_field(p, "conePoints")) {
            if (!c->is_array()) bad("payload.conePoints", "expected an array");
            for (std::size_t i = 0; i < c->size(); ++i) {
                const std::string cp = "payload.conePoints[" + std::to_string(i) + "]";
                const Json& e = (*c)[i];
                s.cone_points.push_back({int_from_json(field(e, "m", cp), cp + ".m"), int_from_json(field(e, "a", cp), cp + ".a"),
                                         int_from_json(field(e, "b", cp), cp + ".b")});
            }
        }
        if (const Json* o = optional_field(p, "obstruction")) s.obstruction = pair_from_json(*o, "payload.obstruction");
        d = std::move(s);
    } else if (kind == "product") {
        d = ProductLattice{factor_from(field(p, "first", "payload"), "payload.first"),
                           factor_from(field(p, "second", "payload"), "payload.second")};
    } else if (kind == "opaque_lattice") {
        OpaqueLattice o;
        o.geometry = opaque_from(string_from(field(p, "geometry", "payload"), "payload.geometry"), "payload.geometry");
        if (const Json* t = optional_field(p, "tag")) o.tag = string_from(*t, "payload.tag");
        d = std::move(o);
    } else {
        bad("kind", "unknown kind '" + kind + "'");
    }
    validate(d);
    return d;
}

LatticeDescriptor parse_descriptor(const std::string& text)
{
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw Error(ErrorKind::Parse, e.what());
    }
    return descriptor_from_json(j);
}

Json abelian_json(const AbelianInvariants& a)
{
    return Json{{"freeRank", a.free_rank}, {"torsion", ints_json(a.torsion)}, {"text", a.to_string()}};
}

Json measure_json(const Measure& m)
{
    if (m.value) return int_json(*m.value);
    return m.status;
}

Json label_json(const GeometryLabel& l)
{
    Json j{{"name", l.to_string()}, {"geometry", geometry_name(l.geometry)}};
    if (l.m) j["m"] = int_json(*l.m);
    if (l.n) j["n"] = int_json(*l.n);
    if (l.q) j["q"] = int_json(*l.q);
    if (l.asserted) j["asserted"] = geometry_name(*l.asserted);
    return j;
}

Json certificate_json(const Certificate& c)
{
    Json params = Json::object();
    for (const auto& [name, v] : c.parameters) params[name] = int_json(v);
    Json inv = Json::array();
    for (const auto& e : c.invariants) inv.push_back({{"name", e.name}, {"value", e.value}});
    return Json{{"label", c.label.to_string()}, {"parameters", params}, {"invariants", inv},
                {"anchors", c.anchors}, {"notes", c.notes}};
}

Json classification_json(const Classification& c)
{
    return Json{{"label", label_json(c.label)}, {"certificate", certificate_json(c.certificate)}};
}

Json features_json(const FeatureVector& f)
{
    Json j{{"hirschLength", measure_json(f.hirsch_length)},
           {"nilpotentClass", measure_json(f.nilpotent_class)},
           {"solvableLength", measure_json(f.solvable_length)},
           {"virtualNilpotentClass", measure_json(f.virtual_nilpotent_class)},
           {"beta1", measure_json(f.beta1)},
           {"eulerChar", measure_json(f.euler_char)},
           {"virtuallyTag", virtual_tag_name(f.virtually)}};
    j["nilradical"] = f.nilradical ? Json(f.nilradical->to_string()) : Json(nullptr);
    if (f.cubic_profile)
        j["cubicProfile"] = {{"kind", cubic_kind_name(f.cubic_profile->kind)},
                             {"discriminant", int_json(f.cubic_profile->discriminant)},
                             {"trace", int_json(f.cubic_profile->trace)},
                             {"traceInverse", int_json(f.cubic_profile->trace_inverse)}};
    else
        j["cubicProfile"] = nullptr;
    j["eulerOrbit"] = f.euler_orbit ? rational_json(*f.euler_orbit) : Json(nullptr);
    return j;
}

Json series_json(const SeriesReport& s)
{
    Json layers = Json::array();
    for (const auto& l : s.layers) layers.push_back(abelian_json(l));
    return Json{{"layers", layers},
                {"length", s.length ? Json(*s.length) : Json(nullptr)},
                {"stabilized", s.stabilized},
                {"truncated", s.truncated}};
}

Json fingerprint_json(const CongruenceFingerprint& f)
{
    return Json{{"modulus", int_json(f.modulus)},
                {"charpolyModQ", ints_json(f.charpoly_mod_q)},
                {"tracePowers", {1, -1, 2, -2}},
                {"tracesModQ", ints_json(f.traces_mod_q)},
                {"quotientAbelianization", abelian_json(f.quotient_abelianization)},
                {"quotientNilpotentClass",
                 f.quotient_nilpotent_class ? Json(*f.quotient_nilpotent_class) : Json(nullptr)}};
}

Json verdict_json(const CompareVerdict& v)
{
    Json j{{"kind", verdict_kind_name(v.kind)}};
    switch (v.kind) {
    case CompareVerdict::Kind::Distinguished:
        j["witnessModulus"] = int_json(v.witness_modulus);
        j["invariant"] = v.invariant;
        break;
    case CompareVerdict::Kind::ConsistentUpTo:
        j["bound"] = int_json(v.bound);
        j["checked"] = v.checked;
        break;
    case CompareVerdict::Kind::ProfinitelyIsomorphic:
        j["conjugator"] = v.conjugator ? matrix_json(*v.conjugator) : Json(nullptr);
        j["inverted"] = v.inverted;
        break;
    }
    return j;
}

CompareVerdict verdict_from_json(const Json& j)
{
    CompareVerdict v;
    const std::string kind = string_from(field(j, "kind", "verdict"), "verdict.kind");
    if (kind == verdict_kind_name(CompareVerdict::Kind::Distinguished)) {
        v.kind = CompareVerdict::Kind::Distinguished;
        v.witness_modulus = int_from_json(field(j, "witnessModulus", "verdict"), "verdict.witnessModulus");
        v.invariant = string_from(field(j, "invariant", "verdict"), "verdict.invariant");
    } else if (kind == verdict_kind_name(CompareVerdict::Kind::ConsistentUpTo)) {
        v.kind = CompareVerdict::Kind::ConsistentUpTo;
        v.bound = int_from_json(field(j, "bound", "verdict"), "verdict.bound");
        const Json& c = field(j, "checked", "verdict");
        if (!c.is_array()) bad("verdict.checked", "expected an array");
        for (std::size_t i = 0; i < c.size(); ++i) v.checked.push_back(string_from(c[i], "verdict.checked"));
    } else if (kind == verdict_kind_name(CompareVerdict::Kind::ProfinitelyIsomorphic)) {
        v.kind = CompareVerdict::Kind::ProfinitelyIsomorphic;
        const Json& c = field(j, "conjugator", "verdict");
        if (!c.is_null()) v.conjugator = matrix_from_json(c, "verdict.conjugator");
        const Json& inv = field(j, "inverted", "verdict");
        if (!inv.is_boolean()) bad("verdict.inverted", "expected a boolean");
        v.inverted = inv.get<bool>();
    } else {
        bad("verdict.kind", "unknown verdict '" + kind + "'");
    }
    return v;
}

Json lattice_comparison_json(const LatticeComparison& c)
{
    Json j{{"verdict", c.verdict},
           {"reason", c.reason},
           {"labelVerdict", label_verdict_name(c.labels.verdict)},
           {"first", label_json(c.labels.first)},
           {"second", label_json(c.labels.second)}};
    j["deep"] = c.deep ? verdict_json(*c.deep) : Json(nullptr);
    return j;
}

Json euler_json(const EulerClass& e)
{
    return Json{{"value", {rational_json(e.value[0]), rational_json(e.value[1])}},
                {"orbitInvariant", rational_json(e.orbit_invariant)}};
}

Json splitting_json(const SplittingVerdict& s)
{
    Json j{{"split", s.split}};
    j["witness"] = s.split ? Json(nullptr) : int_json(s.witness);
    return j;
}

Json luck_json(const LuckReport& r)
{
    Json rows = Json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"index", int_json(row.index)}, {"beta1", int_json(row.beta1)}, {"ratio", rational_json(row.ratio)}});
    return Json{{"rows", rows}, {"limit", rational_json(r.limit)}};
}

Json nilclass_json(const NilclassReport& r)
{
    Json classes = Json::array();
    for (const auto& [q, c] : r.classes) classes.push_back({{"modulus", int_json(q)}, {"class", c}});
    return Json{{"groupClass", r.group_class},
                {"classes", classes},
                {"bottomContent", int_json(r.bottom_content)},
                {"centralLayer", r.central_layer},
                {"predictedStable", ints_json(r.predicted_stable)},
                {"description", r.description}};
}

} // namespace geo4
