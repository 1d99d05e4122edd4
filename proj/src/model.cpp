#include "morphic/model.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "json.hpp"

namespace morphic {

using json = nlohmann::ordered_json;

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& block, const std::string& entry, const std::string& msg) const {
        std::string where = source_ + ": " + block;
        if (!entry.empty()) where += ": " + entry;
        throw ModelError(where + ": " + msg);
    }

    const json& field(const json& obj, const std::string& block, const std::string& key) const {
        if (!obj.is_object()) fail(block, "", "expected an object");
        auto it = obj.find(key);
        if (it == obj.end()) fail(block, key, "missing");
        return *it;
    }

    std::size_t count(const json& v, const std::string& block, const std::string& entry) const {
        if (!v.is_number_integer() || v.get<long long>() < 0) fail(block, entry, "expected a non-negative integer");
        return v.get<std::size_t>();
    }

    double number(const json& v, const std::string& block, const std::string& entry) const {
        if (!v.is_number()) fail(block, entry, "expected a number");
        return v.get<double>();
    }

    Expr expr(const json& v, const Chart& chart, const std::string& block, const std::string& entry) const {
        std::string text;
        if (v.is_string())
            text = v.get<std::string>();
        else if (v.is_number())
            text = v.dump();
        else
            fail(block, entry, "expected an expression string");
        try {
            return simplify(parse(text, chart));
        } catch (const ParseError& e) {
            fail(block, entry, std::string(e.what()) + " at offset " + std::to_string(e.offset()) + " in \"" + text + "\"");
        } catch (const std::domain_error& e) {
            fail(block, entry, e.what());
        }
    }

    std::vector<Expr> row(const json& v, std::size_t size, const Chart& chart, const std::string& block,
                          const std::string& entry) const {
        if (!v.is_array() || v.size() != size)
            fail(block, entry, "expected an array of " + std::to_string(size) + " expressions");
        std::vector<Expr> out;
        for (std::size_t i = 0; i < size; ++i) out.push_back(expr(v[i], chart, block, entry + "[" + std::to_string(i + 1) + "]"));
        return out;
    }

    std::vector<std::vector<Expr>> rows(const json& v, std::size_t size, const Chart& chart, const std::string& block,
                                        const std::string& entry) const {
        if (!v.is_array()) fail(block, entry, "expected an array of rows");
        std::vector<std::vector<Expr>> out;
        for (std::size_t i = 0; i < v.size(); ++i)
            out.push_back(row(v[i], size, chart, block, entry + "[" + std::to_string(i + 1) + "]"));
        return out;
    }

    // Sparse tensor entries "name[i][j]..." with 1-based indices bounded by `dims`.
    template <typename Store>
    void sparse(const json& v, const std::string& name, const std::vector<std::size_t>& dims, const Chart& chart,
                const std::string& block, Store store) const {
        if (!v.is_object()) fail(block, name, "expected an object of \"" + name + "[..]\" entries");
        std::string pattern = "^" + name;
        for (std::size_t d = 0; d < dims.size(); ++d) pattern += "\\[([0-9]+)\\]";
        pattern += "$";
        std::regex re(pattern);
        for (const auto& [key, value] : v.items()) {
            std::smatch m;
            if (!std::regex_match(key, m, re)) fail(block, key, "malformed key, expected " + name + std::string(dims.size(), '#'));
            std::vector<std::size_t> idx;
            for (std::size_t d = 0; d < dims.size(); ++d) {
                std::size_t i = std::stoul(m[d + 1].str());
                if (i < 1 || i > dims[d]) fail(block, key, "index " + std::to_string(i) + " out of range 1.." + std::to_string(dims[d]));
                idx.push_back(i - 1);
            }
            store(idx, expr(value, chart, block, key));
        }
    }

    std::vector<Interval> box(const json& v, std::size_t size, const std::string& block, const std::string& entry) const {
        if (!v.is_array() || v.size() != size) fail(block, entry, "expected " + std::to_string(size) + " intervals");
        std::vector<Interval> out;
        for (std::size_t i = 0; i < size; ++i) {
            std::string e = entry + "[" + std::to_string(i + 1) + "]";
            if (!v[i].is_array() || v[i].size() != 2) fail(block, e, "expected [lo, hi]");
            Interval iv{number(v[i][0], block, e), number(v[i][1], block, e)};
            if (!(iv.lo < iv.hi)) fail(block, e, "expected lo < hi");
            out.push_back(iv);
        }
        return out;
    }

    std::vector<std::string> names(const json& v, const std::string& block, const std::string& entry) const {
        static const std::regex ident("^[A-Za-z_][A-Za-z0-9_]*$");
        if (!v.is_array()) fail(block, entry, "expected an array of names");
        std::vector<std::string> out;
        for (const auto& n : v) {
            if (!n.is_string()) fail(block, entry, "expected a name");
            auto s = n.get<std::string>();
            if (!std::regex_match(s, ident) || s == "sin" || s == "cos" || s == "exp")
                fail(block, entry, "invalid coordinate name '" + s + "'");
            out.push_back(s);
        }
        return out;
    }

private:
    std::string source_;
};

std::vector<Section> sections(const Reader& r, const json& v, std::size_t k, const Chart& chart, const std::string& entry) {
    return r.rows(v, k, chart, "im", entry);
}

json expr_json(const Expr& e, const Chart& chart) {
    if (is_numeric(e)) throw ModelError("numerically tabulated expressions cannot be written to a model file");
    return print(e, chart);
}

json rows_json(const std::vector<std::vector<Expr>>& rows, const Chart& chart) {
    json out = json::array();
    for (const auto& r : rows) {
        json row = json::array();
        for (const auto& e : r) row.push_back(expr_json(e, chart));
        out.push_back(std::move(row));
    }
    return out;
}

json box_json(const std::vector<Interval>& box) {
    json out = json::array();
    for (const auto& iv : box) out.push_back({iv.lo, iv.hi});
    return out;
}

std::string key(const std::string& name, std::initializer_list<std::size_t> idx) {
    std::string out = name;
    for (auto i : idx) out += "[" + std::to_string(i + 1) + "]";
    return out;
}

}  // namespace

bool is_numeric(const Expr& e) {
    if (e.kind() == ExprKind::Tabulated) return true;
    for (const auto& a : e.args())
        if (is_numeric(a)) return true;
    return false;
}

Model parse_model(std::string_view text, const std::string& source) {
    Reader r(source);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelError(source + ": invalid JSON: " + e.what());
    }
    Model m;
    m.source = source;
    const json& schema = r.field(doc, "model", "schema");
    if (!schema.is_string() || schema.get<std::string>() != kModelSchema)
        r.fail("model", "schema", std::string("expected \"") + kModelSchema + "\"");

    const json& chart = r.field(doc, "model", "chart");
    auto names = r.names(r.field(chart, "chart", "coordinates"), "chart", "coordinates");
    if (names.empty()) r.fail("chart", "coordinates", "at least one coordinate is required");
    auto box = r.box(r.field(chart, "chart", "box"), names.size(), "chart", "box");
    try {
        m.chart = make_chart(names, box);
    } catch (const std::invalid_argument& e) {
        r.fail("chart", "", e.what());
    }
    const Chart& c = *m.chart;
    const auto n = c.dimension();

    if (auto it = doc.find("sampling"); it != doc.end()) {
        const json& s = *it;
        if (!s.is_object()) r.fail("sampling", "", "expected an object");
        if (s.contains("samples")) m.sampling.samples = r.count(s["samples"], "sampling", "samples");
        if (s.contains("seed")) {
            if (!s["seed"].is_number_unsigned() && !(s["seed"].is_number_integer() && s["seed"].get<long long>() >= 0))
                r.fail("sampling", "seed", "expected a non-negative integer");
            m.sampling.seed = s["seed"].get<std::uint64_t>();
        }
        if (s.contains("tol")) m.sampling.tol = r.number(s["tol"], "sampling", "tol");
        if (s.contains("h")) m.sampling.h = r.number(s["h"], "sampling", "h");
        try {
            m.sampling.validate();
        } catch (const std::invalid_argument& e) {
            r.fail("sampling", "", e.what());
        }
    }

    if (auto it = doc.find("algebroid"); it != doc.end()) {
        const json& a = *it;
        std::size_t k = r.count(r.field(a, "algebroid", "rank"), "algebroid", "rank");
        linalg::ExprMatrix anchor(n, std::vector<Expr>(k));
        StructureTensor s(k, linalg::ExprMatrix(k, std::vector<Expr>(k)));
        if (a.contains("anchor"))
            r.sparse(a["anchor"], "rho", {n, k}, c, "algebroid", [&](auto idx, Expr e) { anchor[idx[0]][idx[1]] = e; });
        if (a.contains("structure"))
            r.sparse(a["structure"], "C", {k, k, k}, c, "algebroid",
                     [&](auto idx, Expr e) { s[idx[0]][idx[1]][idx[2]] = e; });
        try {
            m.algebroid.emplace(m.chart, k, std::move(anchor), std::move(s));
        } catch (const std::invalid_argument& e) {
            r.fail("algebroid", "structure", e.what());
        }
    }

    if (auto it = doc.find("im"); it != doc.end()) {
        if (!m.algebroid) r.fail("im", "", "requires an algebroid block");
        const json& b = *it;
        const auto k = m.algebroid->rank();
        ImBlock im;
        im.l = r.count(r.field(b, "im", "l"), "im", "l");
        if (im.l > n) r.fail("im", "l", "exceeds the chart dimension");
        im.core = b.contains("core") ? sections(r, b["core"], k, c, "core") : std::vector<Section>{};
        im.complement = sections(r, r.field(b, "im", "complement"), k, c, "complement");
        const auto q = im.complement.size();
        im.gamma.assign(im.l, linalg::ExprMatrix(q, std::vector<Expr>(q)));
        if (b.contains("gamma"))
            r.sparse(b["gamma"], "gamma", {im.l, q, q}, c, "im",
                     [&](auto idx, Expr e) { im.gamma[idx[0]][idx[1]][idx[2]] = e; });
        if (b.contains("parallel_frame")) {
            im.candidate = sections(r, b["parallel_frame"], k, c, "parallel_frame");
            if (im.candidate->size() != q) r.fail("im", "parallel_frame", "expected one section per complement member");
        }
        if (b.contains("parallel_frame_method")) {
            const json& pm = b["parallel_frame_method"];
            std::string s = pm.is_string() ? pm.get<std::string>() : "";
            if (s == "auto")
                im.method = FrameMethod::Auto;
            else if (s == "grid")
                im.method = FrameMethod::Grid;
            else
                r.fail("im", "parallel_frame_method", "expected \"auto\" or \"grid\"");
        }
        m.im = std::move(im);
        try {
            (void)m.im_foliation();
        } catch (const ModelError&) {
            throw;
        } catch (const std::exception& e) {
            r.fail("im", "", e.what());
        }
    }

    if (auto it = doc.find("dirac"); it != doc.end()) {
        const json& b = *it;
        const json& frame = r.field(b, "dirac", "frame");
        if (!frame.is_array() || frame.size() != n)
            r.fail("dirac", "frame", "expected " + std::to_string(n) + " members");
        DiracBlock d;
        for (std::size_t i = 0; i < n; ++i) {
            std::string e = "frame[" + std::to_string(i + 1) + "]";
            auto x = r.row(r.field(frame[i], "dirac", "X"), n, c, "dirac", e + ".X");
            auto xi = r.row(r.field(frame[i], "dirac", "xi"), n, c, "dirac", e + ".xi");
            d.frame.push_back(DiracPair{VectorField(m.chart, x), OneForm(m.chart, xi)});
        }
        if (b.contains("characteristic")) {
            const json& ch = b["characteristic"];
            if (!ch.is_array()) r.fail("dirac", "characteristic", "expected an array of indices");
            for (const auto& v : ch) {
                std::size_t i = r.count(v, "dirac", "characteristic");
                if (i < 1 || i > n) r.fail("dirac", "characteristic", "index " + std::to_string(i) + " out of range");
                d.characteristic.push_back(i - 1);
            }
        }
        m.dirac = std::move(d);
    }

    if (auto it = doc.find("fa"); it != doc.end()) {
        if (!m.algebroid) r.fail("fa", "", "requires an algebroid block");
        const json& b = *it;
        const auto k = m.algebroid->rank();
        FaBlock fa;
        fa.l = r.count(r.field(b, "fa", "l"), "fa", "l");
        if (fa.l > n) r.fail("fa", "l", "exceeds the chart dimension");
        std::vector<std::string> fiber;
        if (b.contains("fiber_coordinates")) {
            fiber = r.names(b["fiber_coordinates"], "fa", "fiber_coordinates");
            if (fiber.size() != k) r.fail("fa", "fiber_coordinates", "expected " + std::to_string(k) + " names");
        }
        std::vector<Interval> fbox(k, Interval{-1, 1});
        if (b.contains("fiber_box")) fbox = r.box(b["fiber_box"], k, "fa", "fiber_box");
        try {
            Chart total = total_space_chart(c, k, Interval{-1, 1}, fiber);
            std::vector<Interval> tb = total.box();
            for (std::size_t a = 0; a < k; ++a) tb[n + a] = fbox[a];
            fa.total = make_chart(total.names(), tb);
        } catch (const std::invalid_argument& e) {
            r.fail("fa", "fiber_coordinates", e.what());
        }
        auto rows = r.rows(r.field(b, "fa", "fields"), n + k, *fa.total, "fa", "fields");
        for (auto& row : rows) fa.fields.emplace_back(fa.total, std::move(row));
        if (b.contains("provenance")) {
            const json& p = b["provenance"];
            std::string s = p.is_string() ? p.get<std::string>() : "";
            if (s == "constructed")
                fa.provenance = Provenance::Constructed;
            else if (s == "user")
                fa.provenance = Provenance::User;
            else
                r.fail("fa", "provenance", "expected \"constructed\" or \"user\"");
        }
        m.fa = std::move(fa);
    }
    return m;
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ModelError(path + ": cannot open");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), path);
}

const LieAlgebroid& Model::require_algebroid() const {
    if (!algebroid) throw ModelError(source + ": algebroid: block required by this command");
    return *algebroid;
}

IMFoliation Model::im_foliation() const {
    const auto& a = require_algebroid();
    if (!im) throw ModelError(source + ": im: block required by this command");
    return IMFoliation{PartialConnection(a, im->l, im->core, im->complement, im->gamma), im->candidate, im->method};
}

MorphicFoliation Model::morphic() const {
    const auto& a = require_algebroid();
    if (!fa) throw ModelError(source + ": fa: block required by this command");
    MorphicFoliation out;
    out.total = fa->total;
    out.base_dim = a.dimension();
    out.rank = a.rank();
    out.l = fa->l;
    out.fields = fa->fields;
    out.provenance = fa->provenance;
    out.certificate = Certificate::Symbolic;
    return out;
}

DiracFrame Model::dirac_frame() const {
    if (!dirac) throw ModelError(source + ": dirac: block required by this command");
    try {
        return DiracFrame(chart, dirac->frame);
    } catch (const std::invalid_argument& e) {
        throw ModelError(source + ": dirac: frame: " + e.what());
    }
}

std::string dump_model(const Model& m) {
    const Chart& c = *m.chart;
    json doc;
    doc["schema"] = kModelSchema;
    doc["chart"] = {{"coordinates", c.names()}, {"box", box_json(c.box())}};
    if (m.algebroid) {
        const auto& a = *m.algebroid;
        json anchor = json::object(), structure = json::object();
        for (std::size_t i = 0; i < a.dimension(); ++i)
            for (std::size_t al = 0; al < a.rank(); ++al)
                if (!a.anchor(i, al).is_zero_literal()) anchor[key("rho", {i, al})] = expr_json(a.anchor(i, al), c);
        for (std::size_t g = 0; g < a.rank(); ++g)
            for (std::size_t al = 0; al < a.rank(); ++al)
                for (std::size_t be = 0; be < a.rank(); ++be)
                    if (!a.structure(g, al, be).is_zero_literal())
                        structure[key("C", {g, al, be})] = expr_json(a.structure(g, al, be), c);
        doc["algebroid"] = {{"rank", a.rank()}, {"anchor", anchor}, {"structure", structure}};
    }
    if (m.im) {
        const auto& im = *m.im;
        json gamma = json::object();
        for (std::size_t i = 0; i < im.gamma.size(); ++i)
            for (std::size_t al = 0; al < im.gamma[i].size(); ++al)
                for (std::size_t be = 0; be < im.gamma[i][al].size(); ++be)
                    if (!im.gamma[i][al][be].is_zero_literal())
                        gamma[key("gamma", {i, al, be})] = expr_json(im.gamma[i][al][be], c);
        json b = {{"l", im.l}, {"core", rows_json(im.core, c)}, {"complement", rows_json(im.complement, c)}, {"gamma", gamma}};
        if (im.candidate) b["parallel_frame"] = rows_json(*im.candidate, c);
        b["parallel_frame_method"] = im.method == FrameMethod::Grid ? "grid" : "auto";
        doc["im"] = std::move(b);
    }
    if (m.dirac) {
        json frame = json::array();
        for (const auto& p : m.dirac->frame)
            frame.push_back({{"X", rows_json({p.x.components()}, c)[0]}, {"xi", rows_json({p.xi.components()}, c)[0]}});
        json ch = json::array();
        for (auto i : m.dirac->characteristic) ch.push_back(i + 1);
        doc["dirac"] = {{"frame", frame}, {"characteristic", ch}};
    }
    if (m.fa) {
        const auto& fa = *m.fa;
        const Chart& t = *fa.total;
        std::vector<std::string> fiber(t.names().begin() + static_cast<std::ptrdiff_t>(c.dimension()), t.names().end());
        std::vector<Interval> fbox(t.box().begin() + static_cast<std::ptrdiff_t>(c.dimension()), t.box().end());
        std::vector<std::vector<Expr>> rows;
        for (const auto& f : fa.fields) rows.push_back(f.components());
        doc["fa"] = {{"l", fa.l},
                     {"fiber_coordinates", fiber},
                     {"fiber_box", box_json(fbox)},
                     {"fields", rows_json(rows, t)},
                     {"provenance", fa.provenance == Provenance::Constructed ? "constructed" : "user"}};
    }
    doc["sampling"] = {{"samples", m.sampling.samples}, {"seed", m.sampling.seed}, {"tol", m.sampling.tol}, {"h", m.sampling.h}};
    return doc.dump(2) + "\n";
}

void set_im(Model& m, const PartialConnection& c, FrameMethod method) {
    ImBlock b;
    b.l = c.leaves();
    b.core = c.core();
    b.complement = c.complement();
    b.gamma = c.gamma();
    b.method = method;
    m.im = std::move(b);
}

void set_fa(Model& m, const MorphicFoliation& fa) {
    FaBlock b;
    b.l = fa.l;
    b.total = fa.total;
    b.fields = fa.fields;
    b.provenance = fa.provenance;
    m.fa = std::move(b);
}

}  // namespace morphic
