#include "strmach/sweep.hpp"

#include <exception>
#include <mutex>

#if defined(STRMACH_OPENMP)
#include <omp.h>
#endif

namespace strmach {

Nat word_count(Nat letters, Nat max_len) {
    Nat total = 0;
    Nat pow = 1;
    for (Nat k = 0; k <= max_len; ++k) {
        total = nat_add(total, pow);
        if (k < max_len) pow = nat_mul(pow, letters);
    }
    return total;
}

std::string word_at(std::string_view letters, Nat rank) {
    Nat n = letters.size();
    Nat len = 0;
    Nat pow = 1;
    while (rank >= pow) {
        rank -= pow;
        pow = nat_mul(pow, n);
        ++len;
    }
    std::string word(len, ' ');
    for (Nat i = 0; i < len; ++i) {
        word[len - 1 - i] = letters[rank % n];
        rank /= n;
    }
    return word;
}

int sweep_thread_count() {
#if defined(STRMACH_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void for_each_word(std::string_view letters, Nat max_len, Exec exec,
                   const std::function<void(Nat, const std::string&)>& fn) {
    const Nat total = word_count(letters.size(), max_len);
    if (exec == Exec::Serial) {
        for (Nat i = 0; i < total; ++i) fn(i, word_at(letters, i));
        return;
    }
#if defined(STRMACH_OPENMP)
    std::exception_ptr first_error;
    std::mutex error_mutex;
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < static_cast<long long>(total); ++i) {
        try {
            fn(static_cast<Nat>(i), word_at(letters, static_cast<Nat>(i)));
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
#else
    for (Nat i = 0; i < total; ++i) fn(i, word_at(letters, i));
#endif
}

}  // namespace strmach
