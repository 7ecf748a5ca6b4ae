// Command-line front end: enumerate hyper-power sets, condition and fuse
// bba documents, and compare the two orders of fusing and conditioning.
//
// Exit codes: 0 success, 1 validation error (bad input), 2 computation error
// (data-dependent failure such as total conflict). stdout carries only the
// result document or table; diagnostics go to stderr.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <hypercond/hypercond.hpp>

#include "CLI11.hpp"

namespace {

using namespace hypercond;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ValidationError("cannot read file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

// Best small rational approximation of a mass: denominator at most 10^6,
// absolute error at most 1e-12. Integers are not worth a comment.
std::optional<std::pair<long long, long long>> small_fraction(double x) {
    if (!(x >= 0.0) || x > 1.0)
        return std::nullopt;
    long long h_prev = 0, h_cur = 1, k_prev = 1, k_cur = 0;
    double v = x;
    for (int iter = 0; iter < 64; ++iter) {
        const double whole = std::floor(v);
        if (whole > 2e6)
            return std::nullopt;
        const long long a = static_cast<long long>(whole);
        const long long h = a * h_cur + h_prev;
        const long long k = a * k_cur + k_prev;
        if (k > 1000000)
            return std::nullopt;
        if (k > 0 && std::abs(x - static_cast<double>(h) / static_cast<double>(k)) <= 1e-12) {
            if (k <= 1)
                return std::nullopt;
            return std::make_pair(h, k);
        }
        const double rest = v - whole;
        if (rest <= 0.0)
            return std::nullopt;
        v = 1.0 / rest;
        h_prev = h_cur;
        h_cur = h;
        k_prev = k_cur;
        k_cur = k;
    }
    return std::nullopt;
}

std::string fraction_comment(double x) {
    if (const auto frac = small_fraction(x))
        return "  # = " + std::to_string(frac->first) + "/" + std::to_string(frac->second);
    return "";
}

std::string fmt(const char* spec, double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), spec, v);
    return buffer;
}

enum class Format { text, csv };

Format parse_format(const std::string& name) {
    if (name == "text")
        return Format::text;
    if (name == "csv")
        return Format::csv;
    throw ValidationError("unknown format '" + name + "' (expected text or csv)");
}

SpacePtr space_from_flags(const std::string& frame_csv, const std::string& model_name,
                          const std::vector<std::string>& constraints) {
    std::vector<std::string> names;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = frame_csv.find(',', start);
        names.push_back(detail::trim(std::string_view(frame_csv).substr(start, comma - start)));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    Frame frame = Frame::make(std::move(names));
    Model model;
    if (model_name == "free")
        model = Model::make_free();
    else if (model_name == "shafer")
        model = Model::make_shafer();
    else if (model_name == "hybrid") {
        std::vector<RegionMask> masks;
        for (const std::string& body : constraints)
            masks.push_back(detail::parse_constraint(frame, body));
        model = Model::make_hybrid(std::move(masks));
    } else {
        throw ValidationError("unknown model '" + model_name + "' (expected free, shafer or hybrid)");
    }
    if (model.kind != ModelKind::hybrid && !constraints.empty())
        throw ValidationError("--empty requires --model hybrid");
    return Space::make(std::move(frame), std::move(model));
}

// Conditioning rule dispatch shared by cmd_condition and cmd_compare_commute:
// BCR1..BCR31 via the engine, "scr" via Shafer's rule.
Bba apply_conditioning(const Bba& m, const Element& truth, const std::string& rule_name) {
    if (const RuleSpec* rule = find_bcr(rule_name))
        return condition(m, truth, *rule);
    std::string lower;
    for (char c : rule_name)
        lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (lower == "scr")
        return scr_condition(m, truth);
    throw ValidationError("unknown conditioning rule '" + rule_name + "' (expected BCR1..BCR31 or scr)");
}

void emit_bba(std::ostream& out, const Bba& bba, Format format,
              const std::optional<double>& conflict) {
    if (format == Format::csv) {
        if (conflict)
            std::cerr << "conflict: " << fmt("%.12g", *conflict) << "\n";
        out << "element,mass\n";
        for (const auto& [element, value] : bba.entries())
            out << to_formula(element) << "," << fmt("%.12g", value) << "\n";
        return;
    }
    out << detail::document_header(*bba.space());
    if (conflict)
        out << "# conflict: " << fmt("%.12g", *conflict) << "\n";
    for (const auto& [element, value] : bba.entries())
        out << to_formula(element) << " : " << fmt("%.12g", value) << fraction_comment(value) << "\n";
}

struct EnumerateArgs {
    std::string input;
    std::string frame_csv;
    std::string model_name;
    std::vector<std::string> constraints;
    std::string truth;
    std::string format = "text";
};

void cmd_enumerate(const EnumerateArgs& args) {
    const Format format = parse_format(args.format);
    SpacePtr space;
    if (!args.input.empty()) {
        if (!args.frame_csv.empty() || !args.model_name.empty() || !args.constraints.empty())
            throw ValidationError("give either a bba document or --frame/--model flags, not both");
        space = load_bba(read_file(args.input)).space;
    } else {
        if (args.frame_csv.empty() || args.model_name.empty())
            throw ValidationError("need a bba document or both --frame and --model");
        space = space_from_flags(args.frame_csv, args.model_name, args.constraints);
    }

    std::vector<Element> elements = enumerate_elements(space);
    std::vector<std::string> parts;
    std::size_t counts[3] = {0, 0, 0};
    if (!args.truth.empty()) {
        const Element truth = parse_formula(space, args.truth);
        const Decomposition decomposition = decompose(space, truth);
        std::map<RegionSet, int> part_of;
        for (const Element& x : decomposition.d1)
            part_of[x.regions()] = 0;
        for (const Element& x : decomposition.d2)
            part_of[x.regions()] = 1;
        for (const Element& x : decomposition.d3)
            part_of[x.regions()] = 2;
        parts.reserve(elements.size());
        for (const Element& x : elements) {
            const int part = part_of.at(x.regions());
            parts.push_back("D" + std::to_string(part + 1));
            ++counts[part];
        }
    }

    if (format == Format::csv) {
        std::cout << (parts.empty() ? "element,cardinal\n" : "element,cardinal,part\n");
        for (std::size_t i = 0; i < elements.size(); ++i) {
            std::cout << to_formula(elements[i]) << "," << dsm_cardinal(elements[i]);
            if (!parts.empty())
                std::cout << "," << parts[i];
            std::cout << "\n";
        }
        return;
    }
    std::cout << "# frame {";
    for (int i = 0; i < space->frame().size(); ++i)
        std::cout << (i ? ", " : "") << space->frame().atoms[static_cast<std::size_t>(i)];
    std::cout << "}, model " << to_string(space->model().kind) << ": " << elements.size()
              << " elements\n";
    if (!parts.empty())
        std::cout << "# truth " << args.truth << ": D1=" << counts[0] << " D2=" << counts[1]
                  << " D3=" << counts[2] << "\n";
    for (std::size_t i = 0; i < elements.size(); ++i) {
        std::cout << to_formula(elements[i]) << " : " << dsm_cardinal(elements[i]);
        if (!parts.empty())
            std::cout << " : " << parts[i];
        std::cout << "\n";
    }
}

struct ConditionArgs {
    std::string input;
    std::string truth;
    std::string rule;
    std::string format = "text";
};

void cmd_condition(const ConditionArgs& args) {
    const Format format = parse_format(args.format);
    const LoadedBba loaded = load_bba(read_file(args.input));
    const Element truth = parse_formula(loaded.space, args.truth);
    const Bba result = apply_conditioning(loaded.bba, truth, args.rule);
    emit_bba(std::cout, result, format, std::nullopt);
}

struct FuseArgs {
    std::string input_a;
    std::string input_b;
    std::string rule;
    std::string format = "text";
};

void cmd_fuse(const FuseArgs& args) {
    const Format format = parse_format(args.format);
    const auto rule = parse_fusion_rule(args.rule);
    if (!rule)
        throw ValidationError("unknown fusion rule '" + args.rule +
                              "' (expected dempster, dsmc, pcr5 or dsmh2)");
    const LoadedBba a = load_bba(read_file(args.input_a));
    const LoadedBba b = load_bba(read_file(args.input_b));
    const FusionResult result = fuse(a.bba, b.bba, *rule);
    const bool report_conflict = *rule == FusionRuleId::dempster || *rule == FusionRuleId::dsmc;
    emit_bba(std::cout, result.normalized(), format,
             report_conflict ? std::optional<double>(result.conflict) : std::nullopt);
}

struct CompareArgs {
    std::string input_a;
    std::string input_b;
    std::string truth;
    std::string fusion;
    std::string bcr;
    std::string format = "text";
};

void cmd_compare_commute(const CompareArgs& args) {
    const Format format = parse_format(args.format);
    if (format != Format::text)
        throw ValidationError("compare-commute supports only --format text");
    const auto rule = parse_fusion_rule(args.fusion);
    if (!rule)
        throw ValidationError("unknown fusion rule '" + args.fusion +
                              "' (expected dempster, dsmc, pcr5 or dsmh2)");
    const LoadedBba a = load_bba(read_file(args.input_a));
    const LoadedBba b = load_bba(read_file(args.input_b));
    const Element truth = parse_formula(a.space, args.truth);

    // FC: fuse both sources first, then condition the combined state.
    const Bba fused = fuse(a.bba, b.bba, *rule).normalized();
    const Bba fc = apply_conditioning(fused, truth, args.bcr);
    // CF: condition each source first, then fuse the conditioned states.
    const Bba ca = apply_conditioning(a.bba, truth, args.bcr);
    const Bba cb = apply_conditioning(b.bba, parse_formula(b.space, args.truth), args.bcr);
    const Bba cf = fuse(ca, cb, *rule).normalized();

    auto mass_at = [](const Bba& m, RegionSet regions) {
        const auto it = m.masses().find(regions);
        return it == m.masses().end() ? 0.0 : it->second;
    };
    std::set<RegionSet> support;
    for (const auto& [regions, value] : fc.masses())
        support.insert(regions);
    for (const auto& [regions, value] : cf.masses())
        support.insert(regions);
    double distance = 0.0;
    for (RegionSet regions : support)
        distance += std::abs(mass_at(fc, regions) - mass_at(cf, regions));

    std::cout << "# commutation of fusion=" << to_string(*rule) << " and conditioning=" << args.bcr
              << " under truth " << to_formula(truth) << "\n";
    std::cout << "# FC: fuse both sources, then condition the result\n";
    std::cout << "# CF: condition each source, then fuse\n";
    std::cout << "FC:\n";
    for (const auto& [element, value] : fc.entries())
        std::cout << to_formula(element) << " : " << fmt("%.6f", value) << fraction_comment(value)
                  << "\n";
    std::cout << "CF:\n";
    for (const auto& [element, value] : cf.entries())
        std::cout << to_formula(element) << " : " << fmt("%.6f", value) << fraction_comment(value)
                  << "\n";
    std::cout << "# L1 distance: " << fmt("%.6f", distance) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyper-power set belief conditioning and fusion"};
    app.require_subcommand(1);

    EnumerateArgs enumerate_args;
    CLI::App* enumerate = app.add_subcommand(
        "enumerate", "List the hyper-power set, optionally split against a conditioning event");
    enumerate->add_option("input", enumerate_args.input, "bba document supplying frame and model");
    enumerate->add_option("--frame", enumerate_args.frame_csv, "comma-separated atom names");
    enumerate->add_option("--model", enumerate_args.model_name, "free, shafer or hybrid");
    enumerate->add_option("--empty", enumerate_args.constraints,
                          "hybrid constraint, e.g. \"A & B\" (repeatable)");
    enumerate->add_option("--truth", enumerate_args.truth, "conditioning event formula");
    enumerate->add_option("--format", enumerate_args.format, "text or csv");

    ConditionArgs condition_args;
    CLI::App* condition_cmd =
        app.add_subcommand("condition", "Condition a bba document on an event");
    condition_cmd->add_option("input", condition_args.input, "bba document")->required();
    condition_cmd->add_option("--truth", condition_args.truth, "conditioning event formula")
        ->required();
    condition_cmd->add_option("--rule", condition_args.rule, "BCR1..BCR31 or scr")->required();
    condition_cmd->add_option("--format", condition_args.format, "text or csv");

    FuseArgs fuse_args;
    CLI::App* fuse_cmd = app.add_subcommand("fuse", "Combine two bba documents");
    fuse_cmd->add_option("input_a", fuse_args.input_a, "first bba document")->required();
    fuse_cmd->add_option("input_b", fuse_args.input_b, "second bba document")->required();
    fuse_cmd->add_option("--rule", fuse_args.rule, "dempster, dsmc, pcr5 or dsmh2")->required();
    fuse_cmd->add_option("--format", fuse_args.format, "text or csv");

    CompareArgs compare_args;
    CLI::App* compare = app.add_subcommand(
        "compare-commute", "Compare fuse-then-condition against condition-then-fuse");
    compare->add_option("input_a", compare_args.input_a, "first bba document")->required();
    compare->add_option("input_b", compare_args.input_b, "second bba document")->required();
    compare->add_option("--truth", compare_args.truth, "conditioning event formula")->required();
    compare->add_option("--fusion", compare_args.fusion, "dempster, dsmc, pcr5 or dsmh2")
        ->required();
    compare->add_option("--bcr", compare_args.bcr, "BCR1..BCR31 or scr")->required();
    compare->add_option("--format", compare_args.format, "text (csv unsupported here)");

    try {
        app.parse(argc, argv);
        if (enumerate->parsed())
            cmd_enumerate(enumerate_args);
        else if (condition_cmd->parsed())
            cmd_condition(condition_args);
        else if (fuse_cmd->parsed())
            cmd_fuse(fuse_args);
        else if (compare->parsed())
            cmd_compare_commute(compare_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ComputationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
