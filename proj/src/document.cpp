#include "strmach/document.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "strmach/util.hpp"

namespace strmach {

using json = nlohmann::json;

std::shared_ptr<const TapeCategory> DefinitionDocument::tape_category(std::string_view name) const {
    for (const auto& c : tape_categories)
        if (c->name == name) return c;
    throw ValidationError("ResolutionError: unknown tape category '" + std::string(name) + "'");
}

TransducerPtr DefinitionDocument::transducer(std::string_view name) const {
    for (const auto& t : transducers)
        if (t->name == name) return t;
    throw ValidationError("ResolutionError: unknown transducer '" + std::string(name) + "'");
}

MachinePtr DefinitionDocument::machine(std::string_view name) const {
    for (const auto& m : machines)
        if (m->name == name) return m;
    throw ValidationError("ResolutionError: unknown machine '" + std::string(name) + "'");
}

const FamilySpec& DefinitionDocument::family(std::string_view name) const {
    for (const auto& f : families)
        if (f.name == name) return f;
    throw ValidationError("ResolutionError: unknown family '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void syntax_error(const std::string& text, std::size_t byte, const std::string& what) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    throw ValidationError("SyntaxError(" + std::to_string(line) + "," + std::to_string(column) +
                          "): " + what);
}

Nat get_nat(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_unsigned())
        throw ValidationError("ResolutionError: expected natural number field '" +
                              std::string(key) + "'");
    return j[key].get<Nat>();
}

std::string get_str(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string())
        throw ValidationError("ResolutionError: expected string field '" + std::string(key) + "'");
    return j[key].get<std::string>();
}

Degree2 parse_degree(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw ValidationError("ResolutionError: degree must be [linear, constant]");
    return Degree2{j[0].get<Nat>(), j[1].get<Nat>()};
}

json degree_json(Degree2 d) { return json::array({d.linear, d.constant}); }

PortSig parse_sig(const json& j, const DefinitionDocument& doc);

MachineObject parse_object(const json& j, const DefinitionDocument& doc) {
    MachineObject obj;
    if (j.contains("states"))
        for (const auto& s : j["states"]) obj.state_spaces.push_back(s.get<StateSpace>());
    if (j.contains("morphs"))
        for (const auto& s : j["morphs"]) obj.morphism_sigs.push_back(parse_sig(s, doc));
    return obj;
}

// Tape signatures are written "CAT:m->n"; machine signatures as an object
// {"level": k, "dom": OBJ, "cod": OBJ}.
PortSig parse_sig(const json& j, const DefinitionDocument& doc) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        auto colon = s.find(':');
        auto arrow = s.find("->");
        if (colon == std::string::npos || arrow == std::string::npos || arrow < colon)
            throw ValidationError("ResolutionError: malformed signature '" + s + "'");
        std::string cat = s.substr(0, colon);
        doc.tape_category(cat);  // must resolve
        Nat in = std::stoull(s.substr(colon + 1, arrow - colon - 1));
        Nat out = std::stoull(s.substr(arrow + 2));
        return TapePortSig{cat, in, out};
    }
    if (j.is_object() && j.contains("level")) {
        MachinePortSig sig;
        sig.level = get_nat(j, "level");
        sig.dom = std::make_shared<const MachineObject>(parse_object(j["dom"], doc));
        sig.cod = std::make_shared<const MachineObject>(parse_object(j["cod"], doc));
        return sig;
    }
    throw ValidationError("ResolutionError: malformed signature");
}

json object_json(const MachineObject& obj);

json sig_json(const PortSig& sig) {
    return std::visit(overloaded{
                          [](const TapePortSig& t) -> json {
                              return t.category + ":" + std::to_string(t.in) + "->" +
                                     std::to_string(t.out);
                          },
                          [](const MachinePortSig& m) -> json {
                              json j;
                              j["level"] = m.level;
                              j["dom"] = object_json(*m.dom);
                              j["cod"] = object_json(*m.cod);
                              return j;
                          },
                      },
                      sig);
}

json object_json(const MachineObject& obj) {
    json j;
    if (!obj.state_spaces.empty()) j["states"] = obj.state_spaces;
    if (!obj.morphism_sigs.empty()) {
        json morphs = json::array();
        for (const auto& s : obj.morphism_sigs) morphs.push_back(sig_json(s));
        j["morphs"] = morphs;
    }
    if (j.is_null()) j = json::object();
    return j;
}

BaseCategory parse_output_category(const json& j, const DefinitionDocument& doc) {
    if (j.is_string()) return BaseCategory::tape_base(doc.tape_category(j.get<std::string>()));
    if (j.is_object() && j.contains("machines"))
        return BaseCategory::machines(get_nat(j, "machines"));
    throw ValidationError("ResolutionError: malformed output category");
}

TransducerPtr parse_transducer(const json& j, const DefinitionDocument& doc) {
    Transducer t;
    t.name = get_str(j, "name");
    t.input_cat = doc.tape_category(get_str(j, "input_category"));
    t.output_cat = parse_output_category(j.at("output_category"), doc);
    if (!j.contains("primary") || !j["primary"].is_array() || j["primary"].size() != 2)
        throw ValidationError("ResolutionError: transducer '" + t.name +
                              "' needs a primary signature [m, n]");
    t.primary_in = j["primary"][0].get<Nat>();
    t.primary_out = j["primary"][1].get<Nat>();
    if (j.contains("aux"))
        for (const auto& s : j["aux"]) t.aux_signatures.push_back(parse_sig(s, doc));
    if (j.contains("outputs"))
        for (const auto& s : j["outputs"]) t.output_signatures.push_back(parse_sig(s, doc));

    std::vector<std::string> state_names;
    std::vector<VarContext> state_vars;
    for (const auto& s : j.at("states")) {
        state_names.push_back(get_str(s, "name"));
        VarContext ctx;
        if (s.contains("vars"))
            for (const auto& v : s["vars"])
                ctx.push_back(VarDecl{parse_sig(v.at("sig"), doc), parse_degree(v.at("degree"))});
        state_vars.push_back(std::move(ctx));
    }
    t.state_image = mk_state_object(t.output_cat, state_names, std::move(state_vars));
    if (j.contains("initial_state")) t.initial_state = get_str(j, "initial_state");

    MachineResolver machines = [&doc](const std::string& name) -> MachinePtr {
        for (const auto& m : doc.machines)
            if (m->name == name) return m;
        return nullptr;
    };

    const StateObjectPtr& states = t.state_image;
    for (const auto& [gen_name, image] : j.at("generators").items()) {
        const TapeGenerator& gen = t.input_cat->at(gen_name);
        std::vector<Nat> transition(state_names.size());
        std::vector<std::vector<FreeTerm>> outputs(state_names.size());
        const json& trans = image.at("transition");
        for (Nat x = 0; x < state_names.size(); ++x) {
            if (!trans.contains(state_names[x]))
                throw ValidationError("ResolutionError: transducer '" + t.name +
                                      "' generator '" + gen_name + "' has no transition from '" +
                                      state_names[x] + "'");
            transition[x] = states->index_of(trans[state_names[x]].get<std::string>());
        }
        if (image.contains("outputs")) {
            for (Nat x = 0; x < state_names.size(); ++x) {
                if (!image["outputs"].contains(state_names[x])) continue;
                for (const auto& text : image["outputs"][state_names[x]])
                    outputs[x].push_back(parse_free_term(text.get<std::string>(), t.output_cat,
                                                         states->vars[x], machines));
            }
        }
        Nat declared = image.contains("degree") ? get_nat(image, "degree") : gen.degree;
        t.generator_images.emplace(gen_name,
                                   mk_state_morphism(states, states, declared,
                                                     std::move(transition), std::move(outputs)));
    }
    return mk_transducer(std::move(t));
}

struct LegAddress {
    std::string node;
    std::string leg;
};

LegAddress parse_leg_address(const std::string& text) {
    auto dot = text.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == text.size())
        throw ValidationError("ResolutionError: malformed leg address '" + text + "'");
    return LegAddress{text.substr(0, dot), text.substr(dot + 1)};
}

MachinePtr parse_machine(const json& j, const DefinitionDocument& doc) {
    StringMachine m;
    m.name = get_str(j, "name");
    if (j.contains("meta_level")) m.meta_level = get_nat(j, "meta_level");
    if (j.contains("reserved"))
        for (const auto& r : j["reserved"]) m.reserved_generators.push_back(r.get<std::string>());

    for (const auto& n : j.at("nodes")) {
        std::string node_name = get_str(n, "name");
        if (n.contains("transducer")) {
            m.nodes.push_back(MachineNode{
                node_name, TransducerMachineNode{doc.transducer(get_str(n, "transducer"))}});
        } else if (n.contains("copy")) {
            m.nodes.push_back(
                MachineNode{node_name, CopyMachineNode{parse_object(n["copy"], doc)}});
        } else if (n.contains("meta")) {
            const json& meta = n["meta"];
            MetaMachineNode node;
            node.level = get_nat(meta, "level");
            node.dom = std::make_shared<const MachineObject>(parse_object(meta.at("dom"), doc));
            node.cod = std::make_shared<const MachineObject>(parse_object(meta.at("cod"), doc));
            m.nodes.push_back(MachineNode{node_name, std::move(node)});
        } else {
            throw ValidationError("ResolutionError: machine '" + m.name + "' node '" + node_name +
                                  "' has no kind (transducer/copy/meta)");
        }
    }

    auto node_index = [&](const std::string& name) -> Nat {
        for (Nat i = 0; i < m.nodes.size(); ++i)
            if (m.nodes[i].name == name) return i;
        throw ValidationError("ResolutionError: machine '" + m.name + "' has no node '" + name +
                              "'");
    };

    if (j.contains("inputs")) {
        for (const auto& in : j["inputs"]) {
            std::string input_name = get_str(in, "name");
            if (in.contains("states"))
                m.inputs.push_back(BoundaryInput{input_name, in["states"].get<StateSpace>()});
            else
                m.inputs.push_back(BoundaryInput{input_name, parse_sig(in.at("sig"), doc)});
        }
    }

    auto parse_producer = [&](const std::string& text) -> LegRef {
        LegAddress addr = parse_leg_address(text);
        if (addr.node == "$input") return LegRef{LegRef::kBoundary, m.input_index(addr.leg)};
        Nat node = node_index(addr.node);
        return LegRef{node, node_output_leg(m.nodes[node], addr.leg)};
    };

    if (j.contains("wires")) {
        for (const auto& w : j["wires"]) {
            std::string text = w.get<std::string>();
            auto arrow = text.find("->");
            if (arrow == std::string::npos)
                throw ValidationError("ResolutionError: malformed wire '" + text + "'");
            auto trim = [](std::string s) {
                while (!s.empty() && s.front() == ' ') s.erase(s.begin());
                while (!s.empty() && s.back() == ' ') s.pop_back();
                return s;
            };
            LegRef from = parse_producer(trim(text.substr(0, arrow)));
            LegAddress to_addr = parse_leg_address(trim(text.substr(arrow + 2)));
            if (to_addr.node == "$input")
                throw ValidationError("ResolutionError: wire target cannot be an input");
            Nat node = node_index(to_addr.node);
            m.wires.push_back(Wire{from, LegRef{node, node_input_leg(m.nodes[node], to_addr.leg)}});
        }
    }

    if (j.contains("outputs"))
        for (const auto& o : j["outputs"]) m.outputs.push_back(parse_producer(o.get<std::string>()));

    if (j.contains("accepting")) {
        for (const auto& a : j["accepting"]) {
            AcceptRule rule;
            rule.output = get_nat(a, "output");
            for (const auto& s : a.at("states")) rule.accepting.insert(s.get<std::string>());
            m.accepting.push_back(std::move(rule));
        }
    }
    return mk_machine(std::move(m));
}

FamilySpec parse_family(const json& j, const DefinitionDocument& doc) {
    FamilySpec f;
    f.name = get_str(j, "name");
    f.base = doc.transducer(get_str(j, "base"));
    for (const auto& s : j.at("stages")) {
        FamilyStage stage;
        if (s.contains("upto")) stage.upto = get_nat(s, "upto");
        stage.transducer = doc.transducer(get_str(s, "transducer"));
        const json& d = s.at("declared");
        if (!d.is_array() || d.size() != 3)
            throw ValidationError("ResolutionError: family '" + f.name +
                                  "' stage declares must be [a, b, c]");
        stage.declared = OutputDegreeTriple{d[0].get<Nat>(), d[1].get<Nat>(), d[2].get<Nat>()};
        f.stages.push_back(std::move(stage));
    }
    if (f.stages.empty())
        throw ValidationError("ResolutionError: family '" + f.name + "' has no stages");
    return f;
}

}  // namespace

DefinitionDocument parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        syntax_error(text, e.byte, e.what());
    }
    DefinitionDocument doc;
    if (j.contains("tape_categories")) {
        for (const auto& c : j["tape_categories"]) {
            std::vector<TapeGenerator> gens;
            if (c.contains("generators"))
                for (const auto& g : c["generators"])
                    gens.push_back(TapeGenerator{get_str(g, "name"), get_nat(g, "in"),
                                                 get_nat(g, "out"), get_nat(g, "degree")});
            doc.tape_categories.push_back(std::make_shared<const TapeCategory>(
                mk_tape_category(get_str(c, "name"), std::move(gens))));
        }
    }
    if (j.contains("transducers"))
        for (const auto& t : j["transducers"]) doc.transducers.push_back(parse_transducer(t, doc));
    if (j.contains("machines"))
        for (const auto& m : j["machines"]) doc.machines.push_back(parse_machine(m, doc));
    if (j.contains("families"))
        for (const auto& f : j["families"]) doc.families.push_back(parse_family(f, doc));
    return doc;
}

namespace {

json output_category_json(const BaseCategory& base) {
    if (base.is_tape()) return base.tape_cat().name;
    json j;
    j["machines"] = base.level;
    return j;
}

json transducer_json(const Transducer& t) {
    json j;
    j["name"] = t.name;
    j["input_category"] = t.input_cat->name;
    j["output_category"] = output_category_json(t.output_cat);
    j["primary"] = json::array({t.primary_in, t.primary_out});
    if (!t.aux_signatures.empty()) {
        json aux = json::array();
        for (const auto& s : t.aux_signatures) aux.push_back(sig_json(s));
        j["aux"] = aux;
    }
    if (!t.output_signatures.empty()) {
        json outs = json::array();
        for (const auto& s : t.output_signatures) outs.push_back(sig_json(s));
        j["outputs"] = outs;
    }
    json states = json::array();
    for (Nat x = 0; x < t.state_image->states.size(); ++x) {
        json s;
        s["name"] = t.state_image->states[x];
        const VarContext& ctx = t.state_image->vars_at(x);
        if (!ctx.empty()) {
            json vars = json::array();
            for (const auto& v : ctx) {
                json var;
                var["sig"] = sig_json(v.sig);
                var["degree"] = degree_json(v.degree);
                vars.push_back(var);
            }
            s["vars"] = vars;
        }
        states.push_back(s);
    }
    j["states"] = states;
    if (t.initial_state) j["initial_state"] = *t.initial_state;

    json gens = json::object();
    for (const auto& [name, image] : t.generator_images) {
        json g;
        g["degree"] = image.degree;
        json trans = json::object();
        json outs = json::object();
        for (Nat x = 0; x < t.state_image->states.size(); ++x) {
            trans[t.state_image->states[x]] = t.state_image->states[image.transition[x]];
            if (!image.outputs[x].empty()) {
                json row = json::array();
                for (const auto& term : image.outputs[x]) row.push_back(free_term_to_string(term));
                outs[t.state_image->states[x]] = row;
            }
        }
        g["transition"] = trans;
        if (!outs.empty()) g["outputs"] = outs;
        gens[name] = g;
    }
    j["generators"] = gens;
    return j;
}

json machine_json(const StringMachine& m) {
    json j;
    j["name"] = m.name;
    j["meta_level"] = m.meta_level;
    json nodes = json::array();
    for (const auto& node : m.nodes) {
        json n;
        n["name"] = node.name;
        std::visit(overloaded{
                       [&](const TransducerMachineNode& t) {
                           n["transducer"] = t.transducer->name;
                       },
                       [&](const CopyMachineNode& c) { n["copy"] = object_json(c.object); },
                       [&](const MetaMachineNode& meta) {
                           json mj;
                           mj["level"] = meta.level;
                           mj["dom"] = object_json(*meta.dom);
                           mj["cod"] = object_json(*meta.cod);
                           n["meta"] = mj;
                       },
                   },
                   node.v);
        nodes.push_back(n);
    }
    j["nodes"] = nodes;

    auto producer_name = [&](const LegRef& ref) {
        if (ref.node == LegRef::kBoundary) return "$input." + m.inputs[ref.leg].name;
        return m.nodes[ref.node].name + "." +
               node_output_legs(m.nodes[ref.node])[ref.leg].name;
    };
    if (!m.wires.empty()) {
        json wires = json::array();
        for (const auto& w : m.wires)
            wires.push_back(producer_name(w.from) + " -> " + m.nodes[w.to.node].name + "." +
                            node_input_legs(m.nodes[w.to.node])[w.to.leg].name);
        j["wires"] = wires;
    }
    if (!m.inputs.empty()) {
        json inputs = json::array();
        for (const auto& in : m.inputs) {
            json i;
            i["name"] = in.name;
            if (const auto* s = std::get_if<StateSpace>(&in.type))
                i["states"] = *s;
            else
                i["sig"] = sig_json(std::get<PortSig>(in.type));
            inputs.push_back(i);
        }
        j["inputs"] = inputs;
    }
    if (!m.outputs.empty()) {
        json outs = json::array();
        for (const auto& o : m.outputs) outs.push_back(producer_name(o));
        j["outputs"] = outs;
    }
    if (!m.accepting.empty()) {
        json acc = json::array();
        for (const auto& rule : m.accepting) {
            json a;
            a["output"] = rule.output;
            a["states"] = rule.accepting;
            acc.push_back(a);
        }
        j["accepting"] = acc;
    }
    if (!m.reserved_generators.empty()) j["reserved"] = m.reserved_generators;
    return j;
}

json family_json(const FamilySpec& f) {
    json j;
    j["name"] = f.name;
    j["base"] = f.base->name;
    json stages = json::array();
    for (const auto& s : f.stages) {
        json stage;
        if (s.upto) stage["upto"] = *s.upto;
        stage["transducer"] = s.transducer->name;
        stage["declared"] = json::array({s.declared.a, s.declared.b, s.declared.c});
        stages.push_back(stage);
    }
    j["stages"] = stages;
    return j;
}

}  // namespace

std::string serialize_document(const DefinitionDocument& doc) {
    json j;
    if (!doc.tape_categories.empty()) {
        json cats = json::array();
        for (const auto& c : doc.tape_categories) {
            json cat;
            cat["name"] = c->name;
            json gens = json::array();
            for (const auto& g : c->generators) {
                json gen;
                gen["name"] = g.name;
                gen["in"] = g.arity_in;
                gen["out"] = g.arity_out;
                gen["degree"] = g.degree;
                gens.push_back(gen);
            }
            cat["generators"] = gens;
            cats.push_back(cat);
        }
        j["tape_categories"] = cats;
    }
    if (!doc.transducers.empty()) {
        json ts = json::array();
        for (const auto& t : doc.transducers) ts.push_back(transducer_json(*t));
        j["transducers"] = ts;
    }
    if (!doc.machines.empty()) {
        json ms = json::array();
        for (const auto& m : doc.machines) ms.push_back(machine_json(*m));
        j["machines"] = ms;
    }
    if (!doc.families.empty()) {
        json fs = json::array();
        for (const auto& f : doc.families) fs.push_back(family_json(f));
        j["families"] = fs;
    }
    return j.dump(2) + "\n";
}

DefinitionDocument load_document_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_document(buffer.str());
}

}  // namespace strmach
