#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "strmach/analysis.hpp"
#include "strmach/builtins.hpp"
#include "strmach/document.hpp"

namespace {

using namespace strmach;

constexpr int kExitValidation = 1;
constexpr int kExitEvaluation = 2;
constexpr int kExitUsage = 3;

// The word's category: the tape category of the machine's endomorphism
// inputs (the document may define several).
std::shared_ptr<const TapeCategory> word_category(const DefinitionDocument& doc,
                                                  const StringMachine& m) {
    for (const auto& in : m.inputs) {
        const auto* sig = std::get_if<PortSig>(&in.type);
        if (!sig) continue;
        const auto* tape = std::get_if<TapePortSig>(sig);
        if (tape && tape->in == 1 && tape->out == 1) return doc.tape_category(tape->category);
    }
    throw UsageError("machine '" + m.name + "' has no endomorphism word input");
}

void check_word(const TapeCategory& cat, const std::string& word) {
    for (char c : word) {
        const auto* g = cat.find(std::string(1, c));
        if (!g || g->arity_in != 1 || g->arity_out != 1)
            throw UsageError("character '" + std::string(1, c) + "' is not in alphabet '" +
                             cat.name + "'");
    }
}

void print_trace(const std::string& prefix, const std::vector<TraceNode>& nodes) {
    for (const auto& n : nodes) {
        std::string path = prefix.empty() ? n.node : prefix + "/" + n.node;
        if (n.is_transducer)
            std::cout << "trace " << path << " primary=" << n.primary_degree << "\n";
        print_trace(path, n.inner);
    }
}

int cmd_run(const DefinitionDocument& doc, const std::string& machine_name,
            const std::string& word, const std::vector<std::string>& states, bool trace) {
    MachinePtr m = doc.machine(machine_name);
    auto cat = word_category(doc, *m);
    check_word(*cat, word);
    MachineResult result = run_machine_on_word(*m, *cat, word, states);
    Nat morph_at = 0, state_at = 0;
    for (Nat i = 0; i < result.outputs.size(); ++i) {
        if (std::holds_alternative<std::string>(result.outputs[i]))
            std::cout << "state[" << state_at++ << "] = "
                      << std::get<std::string>(result.outputs[i]) << "\n";
        else
            std::cout << "output[" << morph_at++ << "] = " << value_to_string(result.outputs[i])
                      << "\n";
    }
    if (result.accepted) std::cout << (*result.accepted ? "accept" : "reject") << "\n";
    if (trace) {
        print_trace("", result.trace.nodes);
        std::cout << "ipd=" << ipd(result.trace) << "\n";
    }
    return 0;
}

int cmd_ipd(const DefinitionDocument& doc, const std::string& machine_name,
            const std::string& word) {
    MachinePtr m = doc.machine(machine_name);
    auto cat = word_category(doc, *m);
    check_word(*cat, word);
    MachineResult result = run_machine_on_word(*m, *cat, word);
    std::cout << ipd(result.trace) << "\n";
    return 0;
}

int cmd_bounds(const DefinitionDocument& doc, const std::string& transducer_name, Nat max_degree) {
    TransducerPtr t = doc.transducer(transducer_name);
    for (Nat j = 0; j < t->output_signatures.size(); ++j) {
        OutputDegreeTriple triple = output_degree(*t, j);
        std::cout << "output[" << j << "] a=" << triple.a << " b=" << triple.b
                  << " c=" << triple.c << "\n";
    }
    DuplicationReport dup = check_duplication(*t, max_degree);
    std::cout << "duplication bound=" << dup.bound << " max_observed=" << dup.max_observed
              << " inputs=" << dup.checked_inputs << (dup.ok() ? " ok" : " VIOLATED") << "\n";
    OutputBoundReport out = check_output_bound(*t, max_degree);
    std::cout << "output_bound checked=" << out.checked << " equality_hits=" << out.equality_hits
              << (out.ok() ? " ok" : " VIOLATED") << "\n";
    for (const auto& v : dup.violations) std::cerr << v << "\n";
    for (const auto& v : out.violations) std::cerr << v << "\n";
    return 0;
}

int cmd_family(const DefinitionDocument& doc, const std::string& family_name, Nat n_max,
               const std::string& word) {
    const FamilySpec& f = doc.family(family_name);
    auto cat = std::shared_ptr<const TapeCategory>(f.base->input_cat);
    check_word(*cat, word);
    FamilyReport report = family_growth(f, n_max, *cat, word);
    std::cout << "N IPD ratio\n";
    for (const auto& row : report.rows) {
        std::cout << row.n << " " << row.ipd_value << " ";
        if (row.has_ratio) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", row.doubling_ratio);
            std::cout << buf;
        } else {
            std::cout << "-";
        }
        std::cout << "\n";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", report.fitted_exponent);
    std::cout << "expansions=" << report.expansion_stages << "\n";
    std::cout << "fitted_exponent=" << buf << "\n";
    return 0;
}

int cmd_demo_palindrome(const std::string& alphabet, const std::string& word) {
    if (alphabet.empty()) throw UsageError("alphabet must not be empty");
    if (alphabet.find('r') != std::string::npos)
        throw UsageError("the demo reserves the character 'r'");
    auto cat = std::make_shared<const TapeCategory>(
        alphabet_category("X", alphabet + "r"));
    check_word(*cat, word);
    MachinePtr m = palindrome_machine(cat, "r");
    MachineResult result = run_machine_on_word(*m, *cat, word);
    std::cout << value_to_string(result.outputs.at(0)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic string machine engine"};
    app.require_subcommand(1);

    std::string file, machine, transducer, family, word, alphabet;
    std::vector<std::string> states;
    bool trace = false;
    Nat max_degree = 8, n_max = 10;

    auto* validate = app.add_subcommand("validate", "validate a definition document");
    validate->add_option("file", file)->required();

    auto* run = app.add_subcommand("run", "run a machine on a word");
    run->add_option("file", file)->required();
    run->add_option("--machine", machine)->required();
    run->add_option("--input", word)->required();
    run->add_option("--state", states);
    run->add_flag("--trace", trace);

    auto* ipd_cmd = app.add_subcommand("ipd", "print the internal total primary input degree");
    ipd_cmd->add_option("file", file)->required();
    ipd_cmd->add_option("--machine", machine)->required();
    ipd_cmd->add_option("--input", word)->required();

    auto* bounds = app.add_subcommand("bounds", "output-degree triples and duplication report");
    bounds->add_option("file", file)->required();
    bounds->add_option("--transducer", transducer)->required();
    bounds->add_option("--max-degree", max_degree);

    auto* family_cmd = app.add_subcommand("family", "IPD growth table for a machine family");
    family_cmd->add_option("file", file)->required();
    family_cmd->add_option("--family", family)->required();
    family_cmd->add_option("--n-max", n_max);
    family_cmd->add_option("--input", word)->required();

    auto* demo = app.add_subcommand("demo", "built-in constructions");
    auto* palindrome = demo->add_subcommand("palindrome", "the meta-vertex palindrome machine");
    palindrome->add_option("--alphabet", alphabet)->required();
    palindrome->add_option("--input", word)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (validate->parsed()) {
            load_document_file(file);
            return 0;
        }
        strmach::DefinitionDocument doc;
        if (run->parsed() || ipd_cmd->parsed() || bounds->parsed() || family_cmd->parsed())
            doc = strmach::load_document_file(file);
        if (run->parsed()) return cmd_run(doc, machine, word, states, trace);
        if (ipd_cmd->parsed()) return cmd_ipd(doc, machine, word);
        if (bounds->parsed()) return cmd_bounds(doc, transducer, max_degree);
        if (family_cmd->parsed()) return cmd_family(doc, family, n_max, word);
        if (palindrome->parsed()) return cmd_demo_palindrome(alphabet, word);
        throw strmach::UsageError("unknown command");
    } catch (const strmach::UsageError& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const strmach::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitEvaluation;
    }
    return 0;
}
