#include "strmach/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "strmach/util.hpp"

namespace strmach {

namespace {

// Exhaustive sweeps spell words as generator names, one character each.
std::string enumeration_letters(const TapeCategory& cat) {
    std::string letters;
    for (const auto& g : cat.generators) {
        if (g.name.size() != 1 || g.arity_in != 1 || g.arity_out != 1)
            throw EvaluationError(
                "exhaustive enumeration requires single-character endomorphism generators");
        letters += g.name;
    }
    if (letters.empty()) throw EvaluationError("tape category has no generators to enumerate");
    return letters;
}

// Minimal linear coefficient over every variable at every input state;
// nullopt when there are no input variables at all.
std::optional<Nat> min_input_linear(const Transducer& t) {
    std::optional<Nat> a_min;
    StateObjectPtr in_obj = t.input_state_object();
    for (Nat x = 0; x < in_obj->states.size(); ++x)
        for (const VarDecl& v : in_obj->vars_at(x)) {
            if (v.degree.linear == 0)
                throw ValidationError("ZeroLinearInputVariable: transducer '" + t.name +
                                      "' state '" + in_obj->states[x] +
                                      "' has a variable with zero linear degree");
            a_min = a_min ? std::min(*a_min, v.degree.linear) : v.degree.linear;
        }
    return a_min;
}

}  // namespace

Nat duplication_bound(const Transducer& t) {
    Nat bound = 0;
    StateObjectPtr out_obj = t.output_state_object();
    for (Nat y = 0; y < out_obj->states.size(); ++y)
        for (const VarDecl& v : out_obj->vars_at(y)) bound = std::max(bound, v.degree.linear);
    return bound;
}

OutputDegreeTriple output_degree(const Transducer& t, Nat output_index) {
    if (output_index >= t.output_signatures.size())
        throw UsageError("transducer '" + t.name + "' has no output " +
                         std::to_string(output_index));
    std::optional<Nat> a_min = min_input_linear(t);
    Nat a_max = 0;
    Nat b_max = 0;
    StateObjectPtr out_obj = t.output_state_object();
    for (Nat y = 0; y < out_obj->states.size(); ++y) {
        const VarDecl& v = out_obj->vars_at(y).at(output_index);
        a_max = std::max(a_max, v.degree.linear);
        b_max = std::max(b_max, v.degree.constant);
    }
    Nat b = a_min ? a_max / *a_min : 0;
    return OutputDegreeTriple{a_max, b, b_max};
}

DuplicationReport check_duplication(const Transducer& t, Nat max_input_degree, Exec exec) {
    min_input_linear(t);  // precondition
    if (t.primary_in != 1 || t.primary_out != 1)
        throw EvaluationError("exhaustive enumeration requires an endomorphism primary signature");
    DuplicationReport report;
    report.bound = duplication_bound(t);

    std::string letters = enumeration_letters(*t.input_cat);
    Nat total = word_count(letters.size(), max_input_degree);
    struct PerWord {
        Nat max_count = 0;
        Nat counted = 0;
        std::vector<std::string> violations;
    };
    std::vector<PerWord> results(total);

    for_each_word(letters, max_input_degree, exec, [&](Nat rank, const std::string& word) {
        TapeTerm term = encode_word(word, *t.input_cat);
        if (term_degree(term, *t.input_cat) > max_input_degree) return;
        PerWord& local = results[rank];
        local.counted = 1;
        StateMorphism image = functor_image(t, term);
        for (Nat x = 0; x < image.source->states.size(); ++x) {
            const VarContext& ctx = image.source->vars_at(x);
            for (Nat j = 0; j < image.outputs[x].size(); ++j) {
                for (Nat i = 0; i < ctx.size(); ++i) {
                    Nat count = var_occurrences(image.outputs[x][j], i);
                    local.max_count = std::max(local.max_count, count);
                    if (count > report.bound)
                        local.violations.push_back(
                            "word '" + word + "' state '" + image.source->states[x] + "' output " +
                            std::to_string(j) + " uses auxiliary " + std::to_string(i) + " " +
                            std::to_string(count) + " times (bound " +
                            std::to_string(report.bound) + ")");
                }
            }
        }
    });

    for (const PerWord& r : results) {
        report.checked_inputs += r.counted;
        report.max_observed = std::max(report.max_observed, r.max_count);
        report.violations.insert(report.violations.end(), r.violations.begin(),
                                 r.violations.end());
    }
    return report;
}

OutputBoundReport check_output_bound(const Transducer& t, Nat max_input_degree, Exec exec) {
    if (t.primary_in != 1 || t.primary_out != 1)
        throw EvaluationError("exhaustive enumeration requires an endomorphism primary signature");
    if (!t.output_cat.is_tape())
        throw EvaluationError("output-bound sweeps support tape output categories");
    OutputBoundReport report;
    for (Nat j = 0; j < t.output_signatures.size(); ++j)
        report.triples.push_back(output_degree(t, j));
    if (t.output_signatures.empty()) return report;

    const TapeCategory& out_cat = t.output_cat.tape_cat();
    std::string out_letters = enumeration_letters(out_cat);

    // Extremal auxiliary sampling: degrees {0, 1, cap} per slot.
    std::vector<Nat> sample_degrees{0, 1, max_input_degree};
    sample_degrees.erase(std::unique(sample_degrees.begin(), sample_degrees.end()),
                         sample_degrees.end());
    auto fill_of_degree = [&](Nat d) {
        return encode_word(std::string(d, out_letters[0]), out_cat);
    };
    Nat combos = 1;
    for (Nat i = 0; i < t.aux_signatures.size(); ++i)
        combos = nat_mul(combos, sample_degrees.size());

    std::string letters = enumeration_letters(*t.input_cat);
    Nat total = word_count(letters.size(), max_input_degree);
    struct PerWord {
        Nat checked = 0;
        Nat equality_hits = 0;
        std::vector<std::string> violations;
    };
    std::vector<PerWord> results(total);

    for_each_word(letters, max_input_degree, exec, [&](Nat rank, const std::string& word) {
        TapeTerm term = encode_word(word, *t.input_cat);
        Nat alpha_deg = term_degree(term, *t.input_cat);
        if (alpha_deg > max_input_degree) return;
        PerWord& local = results[rank];
        StateMorphism image = functor_image(t, term);
        for (Nat combo = 0; combo < combos; ++combo) {
            std::vector<BaseMorphism> aux;
            Nat beta_max = 0;
            Nat rest = combo;
            for (Nat i = 0; i < t.aux_signatures.size(); ++i) {
                Nat d = sample_degrees[rest % sample_degrees.size()];
                rest /= sample_degrees.size();
                aux.emplace_back(fill_of_degree(d));
                beta_max = std::max(beta_max, nat_mul(d, out_cat.generators[0].degree));
            }
            for (Nat x = 0; x < image.source->states.size(); ++x) {
                const VarContext& vars = image.source->vars_at(x);
                std::vector<BaseMorphism> prefix(aux.begin(), aux.begin() + vars.size());
                VarStore store = mk_var_store(image.source, image.source->states[x],
                                              std::move(prefix));
                VarStore out = apply_state_morphism(image, store);
                ++local.checked;
                bool hit = false;
                for (Nat j = 0; j < t.output_signatures.size(); ++j) {
                    Nat gamma = term_degree(std::get<TapeTerm>(out.values[j]), out_cat);
                    const OutputDegreeTriple& triple = report.triples[j];
                    Nat bound = nat_add(
                        nat_add(nat_mul(triple.a, alpha_deg), nat_mul(triple.b, beta_max)),
                        triple.c);
                    if (gamma > bound)
                        local.violations.push_back(
                            "word '" + word + "' state '" + image.source->states[x] +
                            "' aux degree " + std::to_string(beta_max) + ": output " +
                            std::to_string(j) + " has degree " + std::to_string(gamma) +
                            " > bound " + std::to_string(bound));
                    hit = hit || gamma == bound;
                }
                if (hit) ++local.equality_hits;
            }
        }
    });

    for (const PerWord& r : results) {
        report.checked += r.checked;
        report.equality_hits += r.equality_hits;
        report.violations.insert(report.violations.end(), r.violations.begin(),
                                 r.violations.end());
    }
    return report;
}

// --- static IPD bound -------------------------------------------------------------

LinearBound ipd_linear_bound(const StringMachine& m) {
    for (const auto& node : m.nodes)
        if (std::holds_alternative<MetaMachineNode>(node.v))
            throw EvaluationError("IPD bound requires a meta-free machine");

    std::map<std::pair<Nat, Nat>, LinearBound> bounds;  // (node, out leg) -> bound
    auto producer_bound = [&](const LegRef& ref) -> std::optional<LinearBound> {
        if (ref.node == LegRef::kBoundary) {
            if (std::holds_alternative<PortSig>(m.inputs.at(ref.leg).type))
                return LinearBound{1, 0};
            return std::nullopt;
        }
        auto it = bounds.find({ref.node, ref.leg});
        if (it == bounds.end()) return std::nullopt;
        return it->second;
    };

    std::map<std::pair<Nat, Nat>, const Wire*> incoming;
    for (const auto& w : m.wires) incoming[{w.to.node, w.to.leg}] = &w;

    // Topological order exists for validated machines.
    std::vector<Nat> indegree(m.nodes.size(), 0);
    for (const auto& w : m.wires)
        if (w.from.node != LegRef::kBoundary) ++indegree[w.to.node];
    std::vector<Nat> order;
    std::set<std::pair<std::string, Nat>> ready;
    for (Nat i = 0; i < m.nodes.size(); ++i)
        if (indegree[i] == 0) ready.insert({m.nodes[i].name, i});
    while (!ready.empty()) {
        Nat n = ready.begin()->second;
        ready.erase(ready.begin());
        order.push_back(n);
        for (const auto& w : m.wires)
            if (w.from.node == n && --indegree[w.to.node] == 0)
                ready.insert({m.nodes[w.to.node].name, w.to.node});
    }

    LinearBound total;
    for (Nat n : order) {
        const MachineNode& node = m.nodes[n];
        std::visit(
            overloaded{
                [&](const TransducerMachineNode& nn) {
                    const Transducer& t = *nn.transducer;
                    auto primary_wire = incoming.find({n, 1});
                    if (primary_wire == incoming.end())
                        throw EvaluationError("node '" + node.name +
                                              "' primary input is not connected");
                    auto primary = producer_bound(primary_wire->second->from);
                    if (!primary)
                        throw EvaluationError("node '" + node.name +
                                              "' primary input has no degree bound");
                    total.slope = nat_add(total.slope, primary->slope);
                    total.offset = nat_add(total.offset, primary->offset);

                    LinearBound aux_max{0, 0};
                    for (Nat a = 0; a < t.aux_signatures.size(); ++a) {
                        auto it = incoming.find({n, 2 + a});
                        if (it == incoming.end()) continue;  // identity default, degree 0
                        auto b = producer_bound(it->second->from);
                        if (!b)
                            throw EvaluationError("node '" + node.name +
                                                  "' auxiliary input has no degree bound");
                        aux_max.slope = std::max(aux_max.slope, b->slope);
                        aux_max.offset = std::max(aux_max.offset, b->offset);
                    }
                    for (Nat j = 0; j < t.output_signatures.size(); ++j) {
                        OutputDegreeTriple triple = output_degree(t, j);
                        bounds[{n, j + 1}] = LinearBound{
                            nat_add(nat_mul(triple.a, primary->slope),
                                    nat_mul(triple.b, aux_max.slope)),
                            nat_add(nat_add(nat_mul(triple.a, primary->offset),
                                            nat_mul(triple.b, aux_max.offset)),
                                    triple.c)};
                    }
                },
                [&](const CopyMachineNode& nn) {
                    Nat states = nn.object.state_spaces.size();
                    Nat morphs = nn.object.morphism_sigs.size();
                    for (Nat j = 0; j < 2 * morphs; ++j) {
                        auto it = incoming.find({n, states + (j % morphs)});
                        if (it == incoming.end()) continue;
                        auto b = producer_bound(it->second->from);
                        if (b) bounds[{n, 2 * states + j}] = *b;
                    }
                },
                [&](const MetaMachineNode&) {},
            },
            node.v);
    }
    return total;
}

// --- families ----------------------------------------------------------------------

const FamilyStage& family_stage_for(const FamilySpec& f, Nat n) {
    for (const auto& stage : f.stages)
        if (!stage.upto || n <= *stage.upto) return stage;
    throw UsageError("family '" + f.name + "' has no stage rule for N=" + std::to_string(n));
}

FamilyReport family_growth(const FamilySpec& f, Nat n_max, const TapeCategory& cat,
                           const std::string& word) {
    if (n_max == 0) throw UsageError("family range must be nonempty");
    if (word.empty()) throw UsageError("family harness needs a nonempty input word");
    FamilyReport report;

    // Declared parameters must dominate the computed triples. The b term is
    // exempt here: stage auxiliaries receive only the degree-zero identity.
    for (Nat n = 2; n <= n_max; ++n) {
        const FamilyStage& stage = family_stage_for(f, n);
        OutputDegreeTriple computed = output_degree(*stage.transducer, 0);
        if (stage.declared.a < computed.a || stage.declared.c < computed.c)
            throw ValidationError(
                "DeclaredParametersTooSmall: family '" + f.name + "' stage for N=" +
                std::to_string(n) + " declares (" + std::to_string(stage.declared.a) + "," +
                std::to_string(stage.declared.b) + "," + std::to_string(stage.declared.c) +
                "), computed (" + std::to_string(computed.a) + "," + std::to_string(computed.b) +
                "," + std::to_string(computed.c) + ")");
        if (nat_add(stage.declared.a, stage.declared.b) > 1) ++report.expansion_stages;
    }

    MachinePtr k = machine_from_transducer(f.base, f.name);
    for (Nat n = 1; n <= n_max; ++n) {
        if (n >= 2) {
            const FamilyStage& stage = family_stage_for(f, n);
            MachinePtr next = machine_from_transducer(stage.transducer, stage.transducer->name);
            if (k->outputs.empty())
                throw UsageError("family '" + f.name + "' machine has no output to compose");
            MergePair pair{0, Nat(k->outputs.size() - 1), 1, next->input_index("primary")};
            k = wire_machines(*k, *next, {pair}, f.name);
        }
        MachineResult result = run_machine_on_word(*k, cat, word);
        FamilyRow row;
        row.n = n;
        row.ipd_value = ipd(result.trace);
        report.rows.push_back(row);
    }
    for (auto& row : report.rows) {
        if (2 * row.n <= n_max && row.ipd_value > 0) {
            row.doubling_ratio =
                double(report.rows[2 * row.n - 1].ipd_value) / double(row.ipd_value);
            row.has_ratio = true;
        }
    }

    // Log-log least squares over the upper half of the range.
    Nat lo = std::max<Nat>(2, n_max / 2);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    Nat count = 0;
    for (const auto& row : report.rows) {
        if (row.n < lo || row.ipd_value == 0) continue;
        double x = std::log(double(row.n));
        double y = std::log(double(row.ipd_value));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++count;
    }
    if (count >= 2 && sxx * count - sx * sx > 1e-12)
        report.fitted_exponent = (sxy * count - sx * sy) / (sxx * count - sx * sx);
    return report;
}

// --- incremental state evaluation ----------------------------------------------------

IncOp inc_replace(TapeTerm constant) {
    IncOp op;
    op.kind = IncOp::Kind::Replace;
    op.first = std::move(constant);
    return op;
}

IncOp inc_post_compose(TapeTerm endo) {
    IncOp op;
    op.kind = IncOp::Kind::PostCompose;
    op.first = std::move(endo);
    return op;
}

IncOp inc_pre_post_compose(TapeTerm pre, TapeTerm post) {
    IncOp op;
    op.kind = IncOp::Kind::PrePostCompose;
    op.first = std::move(pre);
    op.second = std::move(post);
    return op;
}

IncOp inc_branch(TapeTerm alpha, std::vector<std::optional<TapeTerm>> branches, TapeTerm beta) {
    IncOp op;
    op.kind = IncOp::Kind::Branch;
    op.first = std::move(alpha);
    op.second = std::move(beta);
    op.branches = std::move(branches);
    return op;
}

IncrementalSession::IncrementalSession(TransducerPtr t, std::string_view start)
    : transducer_(std::move(t)) {
    if (transducer_->primary_in != 1 || transducer_->primary_out != 1)
        throw UsageError("incremental sessions require an endomorphism primary signature");
    start_ = transducer_->state_image->index_of(start);
    tracked_.resize(transducer_->state_image->states.size());
    for (Nat s = 0; s < tracked_.size(); ++s) tracked_[s] = s;
}

const std::string& IncrementalSession::state() const {
    return transducer_->state_image->states.at(tracked_.at(start_));
}

namespace {

std::vector<std::string> split_product_state(const std::string& name, Nat parts) {
    if (parts == 1) return {name};
    std::vector<std::string> out;
    std::string piece;
    for (char c : name) {
        if (c == '|') {
            out.push_back(piece);
            piece.clear();
        } else {
            piece += c;
        }
    }
    out.push_back(piece);
    if (out.size() != parts)
        throw EvaluationError("product state '" + name + "' does not split into " +
                              std::to_string(parts) + " components");
    return out;
}

std::string join_product_state(const std::vector<std::string>& parts) {
    std::string out;
    for (Nat i = 0; i < parts.size(); ++i) {
        if (i) out += "|";
        out += parts[i];
    }
    return out;
}

}  // namespace

void IncrementalSession::apply(const IncOp& op) {
    const Transducer& t = *transducer_;
    const TapeCategory& cat = *t.input_cat;
    const StateObjectPtr& states = t.state_image;
    auto transition_of = [&](const TapeTerm& term) {
        return functor_image(t, term).transition;
    };
    auto expect_endo = [&](const TapeTerm& term, const char* what) {
        auto sig = term_signature(term, cat);
        if (sig.in != 1 || sig.out != 1)
            throw IllTypedError(std::string(what) + " must have signature 1->1");
    };

    switch (op.kind) {
        case IncOp::Kind::Replace: {
            expect_endo(op.first, "replacement morphism");
            std::vector<Nat> delta = transition_of(op.first);
            for (Nat s = 0; s < tracked_.size(); ++s) tracked_[s] = delta[s];
            break;
        }
        case IncOp::Kind::PostCompose: {
            expect_endo(op.first, "post-composed morphism");
            std::vector<Nat> delta = transition_of(op.first);
            for (Nat s = 0; s < tracked_.size(); ++s) tracked_[s] = delta[tracked_[s]];
            break;
        }
        case IncOp::Kind::PrePostCompose: {
            expect_endo(op.first, "pre-composed morphism");
            expect_endo(op.second, "post-composed morphism");
            std::vector<Nat> pre = transition_of(op.first);
            std::vector<Nat> post = transition_of(op.second);
            std::vector<Nat> next(tracked_.size());
            for (Nat s = 0; s < tracked_.size(); ++s) next[s] = post[tracked_[pre[s]]];
            tracked_ = next;
            break;
        }
        case IncOp::Kind::Branch: {
            Nat slots = op.branches.size();
            auto alpha_sig = term_signature(op.first, cat);
            auto beta_sig = term_signature(op.second, cat);
            if (alpha_sig.in != 1 || alpha_sig.out != slots)
                throw IllTypedError("branch opener must have signature 1->" +
                                    std::to_string(slots));
            if (beta_sig.in != slots || beta_sig.out != 1)
                throw IllTypedError("branch closer must have signature " + std::to_string(slots) +
                                    "->1");
            Nat holes = 0;
            for (const auto& b : op.branches)
                if (!b) ++holes;
            if (holes > 1)
                throw EvaluationError(
                    "MultipleGeneratorOccurrences: the tracked input may appear at most once");

            StateMorphism alpha = functor_image(t, op.first);
            StateMorphism beta = functor_image(t, op.second);
            std::vector<std::vector<Nat>> branch_delta(slots);
            for (Nat j = 0; j < slots; ++j) {
                if (!op.branches[j]) continue;
                expect_endo(*op.branches[j], "branch fill");
                branch_delta[j] = transition_of(*op.branches[j]);
            }
            std::vector<Nat> next(tracked_.size());
            for (Nat s = 0; s < tracked_.size(); ++s) {
                std::string opened = alpha.target->states.at(alpha.transition[s]);
                std::vector<std::string> parts = split_product_state(opened, slots);
                std::vector<std::string> after(slots);
                for (Nat j = 0; j < slots; ++j) {
                    Nat idx = states->index_of(parts[j]);
                    after[j] = states->states.at(op.branches[j] ? branch_delta[j][idx]
                                                                : tracked_[idx]);
                }
                Nat packed = beta.source->index_of(join_product_state(after));
                next[s] = beta.transition[packed];
            }
            tracked_ = next;
            break;
        }
    }
    ++ops_;
}

// --- regularity probe ------------------------------------------------------------------

Nat residual_probe(const StringMachine& m, const TapeCategory& cat, Nat max_len, Exec exec) {
    for (const auto& node : m.nodes)
        if (std::holds_alternative<MetaMachineNode>(node.v))
            throw EvaluationError("MetaVertexPresent: the residual probe requires a meta-free "
                                  "machine");
    if (m.accepting.empty())
        throw EvaluationError("the residual probe requires a machine with accepting states");

    std::string letters = enumeration_letters(cat);
    Nat total = word_count(letters.size(), max_len);
    std::vector<std::string> suffixes(total);
    for (Nat j = 0; j < total; ++j) suffixes[j] = word_at(letters, j);

    std::vector<std::vector<char>> signatures(total);
    for_each_word(letters, max_len, exec, [&](Nat rank, const std::string& prefix) {
        std::vector<char>& sig = signatures[rank];
        sig.resize(total);
        for (Nat j = 0; j < total; ++j) {
            MachineResult r = run_machine_on_word(m, cat, prefix + suffixes[j]);
            sig[j] = r.accepted.value_or(false) ? 1 : 0;
        }
    });

    std::set<std::vector<char>> classes(signatures.begin(), signatures.end());
    return classes.size();
}

}  // namespace strmach
