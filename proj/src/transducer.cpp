#include "strmach/transducer.hpp"

#include "strmach/util.hpp"

namespace strmach {

const StateMorphism& Transducer::image_of(std::string_view gen) const {
    auto it = generator_images.find(std::string(gen));
    if (it == generator_images.end())
        throw UnknownGeneratorError("UnknownGenerator: no image for '" + std::string(gen) +
                                    "' in transducer '" + name + "'");
    return it->second;
}

StateObjectPtr Transducer::input_state_object() const { return tensor_power(state_image, primary_in); }
StateObjectPtr Transducer::output_state_object() const {
    return tensor_power(state_image, primary_out);
}

ValidationReport validate_transducer(const Transducer& t) {
    ValidationReport report;
    if (!t.state_image) {
        report.fail("transducer '" + t.name + "': missing state image");
        return report;
    }
    for (const auto& gen : t.input_cat->generators) {
        auto it = t.generator_images.find(gen.name);
        if (it == t.generator_images.end()) {
            report.fail("transducer '" + t.name + "': no image for generator '" + gen.name + "'");
            continue;
        }
        const StateMorphism& image = it->second;
        if (!(*image.source == *tensor_power(t.state_image, gen.arity_in)) ||
            !(*image.target == *tensor_power(t.state_image, gen.arity_out)))
            report.fail("transducer '" + t.name + "': image of '" + gen.name +
                        "' is not a morphism F(X)^" + std::to_string(gen.arity_in) + " -> F(X)^" +
                        std::to_string(gen.arity_out));
        if (image.degree > gen.degree)
            report.fail("FilteredFunctorViolation: transducer '" + t.name + "', generator '" +
                        gen.name + "' has degree " + std::to_string(gen.degree) +
                        " but its image has degree " + std::to_string(image.degree));
        ValidationReport inner = validate_state_morphism(image);
        for (auto& v : inner.violations)
            report.fail("transducer '" + t.name + "', image of '" + gen.name + "': " + v);
    }
    for (const auto& [name, image] : t.generator_images)
        if (!t.input_cat->find(name))
            report.fail("transducer '" + t.name + "': image for unknown generator '" + name + "'");

    // Input prefix condition: variables at every input state form a prefix
    // of the auxiliary signatures.
    StateObjectPtr in_obj = t.input_state_object();
    for (Nat x = 0; x < in_obj->states.size(); ++x) {
        const VarContext& vars = in_obj->vars_at(x);
        if (vars.size() > t.aux_signatures.size()) {
            report.fail("PrefixViolation: input state '" + in_obj->states[x] + "' has " +
                        std::to_string(vars.size()) + " variables, only " +
                        std::to_string(t.aux_signatures.size()) + " auxiliary signatures");
            continue;
        }
        for (Nat i = 0; i < vars.size(); ++i)
            if (!(vars[i].sig == t.aux_signatures[i]))
                report.fail("PrefixViolation: input state '" + in_obj->states[x] + "' variable " +
                            std::to_string(i) + " is " + to_string(vars[i].sig) +
                            ", auxiliary signature is " + to_string(t.aux_signatures[i]));
    }

    // Output prefix condition: the output signatures form a prefix of the
    // variables at every output state.
    StateObjectPtr out_obj = t.output_state_object();
    for (Nat y = 0; y < out_obj->states.size(); ++y) {
        const VarContext& vars = out_obj->vars_at(y);
        if (t.output_signatures.size() > vars.size()) {
            report.fail("PrefixViolation: output state '" + out_obj->states[y] + "' has only " +
                        std::to_string(vars.size()) + " variables for " +
                        std::to_string(t.output_signatures.size()) + " output signatures");
            continue;
        }
        for (Nat j = 0; j < t.output_signatures.size(); ++j)
            if (!(vars[j].sig == t.output_signatures[j]))
                report.fail("PrefixViolation: output state '" + out_obj->states[y] + "' variable " +
                            std::to_string(j) + " is " + to_string(vars[j].sig) +
                            ", output signature is " + to_string(t.output_signatures[j]));
    }

    if (t.initial_state) {
        bool found = false;
        for (const auto& s : in_obj->states) found = found || s == *t.initial_state;
        if (!found)
            report.fail("transducer '" + t.name + "': initial state '" + *t.initial_state +
                        "' is not an input state");
    }
    return report;
}

TransducerPtr mk_transducer(Transducer t) {
    ValidationReport report = validate_transducer(t);
    if (!report.ok) throw ValidationError(report.joined());
    return std::make_shared<const Transducer>(std::move(t));
}

StateMorphism functor_image(const Transducer& t, const TapeTerm& term) {
    return std::visit(
        overloaded{
            [&](const GenNode& g) -> StateMorphism { return t.image_of(g.name); },
            [&](const IdNode& i) -> StateMorphism {
                return identity_state_morphism(tensor_power(t.state_image, i.width));
            },
            [&](const SeqNode& s) -> StateMorphism {
                return compose_state(functor_image(t, s.second), functor_image(t, s.first));
            },
            [&](const ParNode& p) -> StateMorphism {
                return tensor_state_morphism(functor_image(t, p.left), functor_image(t, p.right));
            },
            [&](const CopyNode&) -> StateMorphism { return copy_state_morphism(t.state_image); },
            [&](const DiscardNode&) -> StateMorphism {
                return discard_state_morphism(t.state_image);
            },
            [&](const SwapNode&) -> StateMorphism {
                return swap_state_morphism(t.state_image, t.state_image);
            },
        },
        term.node().v);
}

TransducerResult evaluate_transducer(const Transducer& t, std::string_view start,
                                     const TapeTerm& primary,
                                     const std::vector<BaseMorphism>& aux) {
    auto sig = term_signature(primary, *t.input_cat);
    if (sig.in != t.primary_in || sig.out != t.primary_out)
        throw IllTypedError("primary input of transducer '" + t.name + "' must have signature " +
                            std::to_string(t.primary_in) + "->" + std::to_string(t.primary_out) +
                            ", got " + std::to_string(sig.in) + "->" + std::to_string(sig.out));
    StateMorphism image = functor_image(t, primary);
    StateObjectPtr in_obj = image.source;
    Nat x = in_obj->index_of(start);
    const VarContext& vars = in_obj->vars_at(x);
    if (aux.size() < vars.size())
        throw EvaluationError("StoreMismatch: state '" + std::string(start) + "' needs " +
                              std::to_string(vars.size()) + " auxiliary values, got " +
                              std::to_string(aux.size()));
    std::vector<BaseMorphism> prefix(aux.begin(), aux.begin() + vars.size());
    VarStore store = mk_var_store(in_obj, start, std::move(prefix));
    VarStore result = apply_state_morphism(image, store);

    TransducerResult out;
    out.output_state = result.object->states.at(result.state);
    if (result.values.size() < t.output_signatures.size())
        throw EvaluationError("output state '" + out.output_state + "' carries fewer values than " +
                              "the declared output signatures");
    out.outputs.assign(result.values.begin(),
                       result.values.begin() + t.output_signatures.size());
    out.primary_degree_consumed = term_degree(primary, *t.input_cat);
    return out;
}

}  // namespace strmach
