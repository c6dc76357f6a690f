// Times the analysis sweeps with the serial driver against the OpenMP one.

#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include "strmach/analysis.hpp"
#include "strmach/builtins.hpp"
#include "strmach/sweep.hpp"

using namespace strmach;

namespace {

double time_of(const std::function<void()>& fn) {
    auto start = std::chrono::steady_clock::now();
    fn();
    auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %8.3fs  parallel %8.3fs  speedup %5.2fx\n", name, serial, parallel,
                parallel > 0 ? serial / parallel : 0.0);
}

Dfa even_a() {
    Dfa dfa;
    dfa.name = "evenA";
    dfa.states = {"even", "odd"};
    dfa.start = "even";
    dfa.accepting = {"even"};
    dfa.transition["even"]["a"] = "odd";
    dfa.transition["even"]["b"] = "even";
    dfa.transition["odd"]["a"] = "even";
    dfa.transition["odd"]["b"] = "odd";
    return dfa;
}

Dfa ends_b() {
    Dfa dfa;
    dfa.name = "endsB";
    dfa.states = {"no", "yes"};
    dfa.start = "no";
    dfa.accepting = {"yes"};
    dfa.transition["no"]["a"] = "no";
    dfa.transition["no"]["b"] = "yes";
    dfa.transition["yes"]["a"] = "no";
    dfa.transition["yes"]["b"] = "yes";
    return dfa;
}

}  // namespace

int main() {
    std::printf("threads: %d\n", sweep_thread_count());

    auto abr = std::make_shared<const TapeCategory>(alphabet_category("X", "abr"));
    auto ab = std::make_shared<const TapeCategory>(alphabet_category("X", "ab"));

    {
        MachinePtr pal = palindrome_machine(abr, "r");
        auto sweep = [&](Exec exec) {
            std::vector<char> is_palindrome(word_count(2, 9));
            for_each_word("ab", 9, exec, [&](Nat rank, const std::string& word) {
                MachineResult r = run_machine_on_word(*pal, *abr, word);
                auto letters = flatten_word(std::get<TapeTerm>(r.outputs[0]), *abr);
                is_palindrome[rank] = letters && letters->empty();
            });
        };
        double serial = time_of([&] { sweep(Exec::Serial); });
        double parallel = time_of([&] { sweep(Exec::Parallel); });
        report("palindrome sweep (len 9)", serial, parallel);
    }

    {
        MachinePtr chain = intersection_chain({even_a(), ends_b()}, ab, "chain");
        double serial = time_of([&] { residual_probe(*chain, *ab, 6, Exec::Serial); });
        double parallel = time_of([&] { residual_probe(*chain, *ab, 6, Exec::Parallel); });
        report("residual probe (len 6)", serial, parallel);
    }

    {
        TransducerPtr strip = strip_transducer(abr, "a", "r");
        double serial = time_of([&] {
            check_duplication(*strip, 10, Exec::Serial);
            check_output_bound(*strip, 10, Exec::Serial);
        });
        double parallel = time_of([&] {
            check_duplication(*strip, 10, Exec::Parallel);
            check_output_bound(*strip, 10, Exec::Parallel);
        });
        report("bound sweeps (degree 10)", serial, parallel);
    }
    return 0;
}
