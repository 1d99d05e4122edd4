#include "morphic/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "morphic/dirac.hpp"
#include "morphic/gallery.hpp"
#include "morphic/imfoliation.hpp"
#include "morphic/model.hpp"

namespace morphic {

namespace {

struct Options {
    std::string model;
    std::string report;
    std::string out;
    std::optional<std::size_t> samples;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    std::optional<double> h;
    std::string example;
    std::string write;
};

struct Outcome {
    Report report;
    std::optional<std::string> emitted;  // model JSON
    std::string emit_note;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

SampleSpec sampling(const Model& m, const Options& o) {
    SampleSpec s = m.sampling;
    if (o.samples) s.samples = *o.samples;
    if (o.seed) s.seed = *o.seed;
    if (o.tol) s.tol = *o.tol;
    if (o.h) s.h = *o.h;
    try {
        s.validate();
    } catch (const std::invalid_argument& e) {
        throw ModelError(std::string("command line: ") + e.what());
    }
    return s;
}

void emit(Outcome& o, const Model& m) {
    try {
        o.emitted = dump_model(m);
    } catch (const ModelError& e) {
        o.emit_note = std::string("no model written: ") + e.what();
    }
}

Outcome run_command(const std::string& cmd, const Model& model, const SampleSpec& spec) {
    Outcome o{Report(cmd), std::nullopt, {}};
    Report& r = o.report;
    if (cmd == "validate") {
        r.append(check_axioms(model.require_algebroid(), spec));
    } else if (cmd == "check-im") {
        r = check_im(model.im_foliation(), spec);
    } else if (cmd == "roundtrip") {
        r = roundtrip(model.im_foliation(), spec);
    } else if (cmd == "build-fa") {
        IMFoliation im = model.im_foliation();
        Report pre = check_im(im, spec);
        r.append(pre, "check-im: ");
        r.set_certificate(pre.certificate());
        if (!pre.passed()) return o;
        MorphicFoliation fa = construct_fa(im, spec);
        r.append(check_morphic(fa, im.algebroid(), spec), "check-morphic: ");
        Model next = model;
        set_fa(next, fa);
        emit(o, next);
    } else if (cmd == "extract") {
        const LieAlgebroid& a = model.require_algebroid();
        MorphicFoliation fa = model.morphic();
        Report pre = check_morphic(fa, a, spec);
        r.append(pre, "check-morphic: ");
        if (!pre.passed()) return o;
        std::optional<std::vector<Section>> complement;
        if (model.im) complement = model.im->complement;
        Extraction ex = extract_nabla(fa, a, spec, complement);
        r.append(ex.report);
        Model next = model;
        set_im(next, ex.connection, model.im ? model.im->method : FrameMethod::Auto);
        emit(o, next);
    } else if (cmd == "quotient") {
        Quotient q = quotient(model.im_foliation(), spec);
        r = q.report;
        if (!q.algebroid) return o;
        if (q.algebroid->dimension() == 0) {
            o.emit_note = "no model written: the quotient lives over a point";
            return o;
        }
        Model next;
        next.source = model.source;
        next.chart = q.algebroid->chart();
        next.algebroid = *q.algebroid;
        next.sampling = model.sampling;
        emit(o, next);
    } else if (cmd == "dirac") {
        DiracFrame d = model.dirac_frame();
        Report pre = check_dirac(d, spec);
        r.append(pre);
        if (!pre.passed()) return o;
        LieAlgebroid a = dirac_to_algebroid(d, spec);
        r.append(check_axioms(a, spec), "algebroid: ");
        std::optional<IMFoliation> im;
        try {
            im = dirac_im(d, model.dirac->characteristic, spec);
        } catch (const DiracError& e) {
            r.fail("characteristic subframe", e.what());
            return o;
        }
        Report ci = check_im(*im, spec);
        r.append(ci, "check-im: ");
        r.set_certificate(ci.certificate());
        Model next = model;
        next.algebroid = a;
        set_im(next, im->connection);
        emit(o, next);
    } else {
        throw ModelError("unknown command '" + cmd + "'");
    }
    return o;
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path);
    if (!f || !(f << text)) {
        err << "error: cannot write " << path << "\n";
        return false;
    }
    return true;
}

int finish(const Outcome& o, const Options& opt, double seconds, std::ostream& out, std::ostream& err) {
    out << report_text(o.report);
    out << "wall time: " << num(seconds) << " s\n";
    if (!o.emit_note.empty()) out << o.emit_note << "\n";
    if (o.emitted) {
        if (!opt.out.empty()) {
            if (!write_file(opt.out, *o.emitted, err)) return 2;
            out << "model written to " << opt.out << "\n";
        } else {
            out << "--- emitted model ---\n" << *o.emitted;
        }
    }
    if (!opt.report.empty() && !write_file(opt.report, report_json(o.report), err)) return 2;
    return o.report.passed() ? 0 : 1;
}

int execute(const std::string& cmd, const Options& opt, std::ostream& out, std::ostream& err) {
    auto start = std::chrono::steady_clock::now();
    try {
        Model model;
        std::string command = cmd;
        if (cmd == "examples") {
            if (opt.example.empty()) {
                for (const auto& e : gallery()) out << e.name << "  [" << e.command << "]  " << e.description << "\n";
                return 0;
            }
            const GalleryEntry* g = find_gallery(opt.example);
            if (!g) {
                err << "error: unknown example '" << opt.example << "'\n";
                return 2;
            }
            model = parse_model(g->model, g->name);
            if (!opt.write.empty()) {
                if (!write_file(opt.write, dump_model(model), err)) return 2;
                out << "model written to " << opt.write << "\n";
            }
            command = g->command;
        } else {
            model = load_model(opt.model);
        }
        Outcome o = run_command(command, model, sampling(model, opt));
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return finish(o, opt, seconds, out, err);
    } catch (const ModelError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace

std::string report_text(const Report& r) {
    std::string s = r.command() + ": " + (r.passed() ? "PASS" : "FAIL") + "\n";
    std::size_t width = 0;
    for (const auto& e : r.entries()) width = std::max(width, e.name.size());
    for (const auto& e : r.entries()) {
        s += e.passed() ? "  pass  " : "  FAIL  ";
        s += e.name + std::string(width - e.name.size() + 2, ' ');
        s += to_string(e.tier);
        s += "  residual " + num(e.max_residual);
        if (!e.label.empty()) s += "  " + e.label;
        if (!e.witness.empty()) {
            s += "  at (";
            for (std::size_t i = 0; i < e.witness.size(); ++i) s += (i ? ", " : "") + num(e.witness[i]);
            s += ")";
        }
        if (!e.note.empty()) s += "  [" + e.note + "]";
        s += "\n";
    }
    s += std::string("certificate: ") + to_string(r.certificate()) + "\n";
    return s;
}

std::string report_json(const Report& r) {
    using json = nlohmann::ordered_json;
    json entries = json::array();
    for (const auto& e : r.entries()) {
        Certificate c = e.certificate == Certificate::None ? r.certificate() : e.certificate;
        entries.push_back({{"name", e.name},
                           {"passed", e.passed()},
                           {"tier", to_string(e.tier)},
                           {"max_residual", e.max_residual},
                           {"witness", e.witness},
                           {"label", e.label},
                           {"certificate", to_string(c)},
                           {"note", e.note}});
    }
    json doc = {{"command", r.command()},
                {"passed", r.passed()},
                {"certificate", to_string(r.certificate())},
                {"entries", entries}};
    return doc.dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lie algebroids, IM-foliations and morphic foliations in coordinates", "morphic"};
    app.require_subcommand(1);
    Options opt;
    struct Command {
        const char* name;
        const char* help;
        bool emits;
    };
    const Command commands[] = {
        {"validate", "check the Lie algebroid axioms", false},
        {"check-im", "check the IM-foliation conditions (0)-(4)", false},
        {"build-fa", "construct the morphic foliation F_A and check it", true},
        {"extract", "read the connection back from an fa block", true},
        {"roundtrip", "check-im, build-fa, extract and compare the connections", false},
        {"quotient", "build the quotient algebroid over the leaf space", true},
        {"dirac", "derive the algebroid and IM-foliation of a Dirac frame", true},
    };
    auto common = [&](CLI::App* sub) {
        sub->add_option("--report", opt.report, "write the JSON report to PATH");
        sub->add_option("--samples", opt.samples, "sample points per randomized check")->check(CLI::PositiveNumber);
        sub->add_option("--seed", opt.seed, "sampling seed");
        sub->add_option("--tol", opt.tol, "residual tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--fd-step", opt.h, "finite difference step")->check(CLI::PositiveNumber);
    };
    std::string chosen;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--model", opt.model, "model file")->required();
        common(sub);
        if (c.emits) sub->add_option("--out", opt.out, "write the emitted model to PATH");
        sub->callback([&chosen, name = c.name] { chosen = name; });
    }
    auto* ex = app.add_subcommand("examples", "list the gallery, or run the named example");
    ex->add_option("name", opt.example, "example name");
    ex->add_option("--write", opt.write, "write the example model to PATH");
    ex->add_option("--out", opt.out, "write the emitted model to PATH");
    common(ex);
    ex->callback([&chosen] { chosen = "examples"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    return execute(chosen, opt, out, err);
}

}  // namespace morphic
