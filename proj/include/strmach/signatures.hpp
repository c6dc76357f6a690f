#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "strmach/degrees.hpp"

namespace strmach {

class StringMachine;

// A finite state space, as the ordered list of its state identifiers.
using StateSpace = std::vector<std::string>;

// State legs wire only onto identical underlying sets; order is presentation.
bool same_state_space(const StateSpace& a, const StateSpace& b);

struct MachineObject;

// Signature of a morphism leg in some base category: either a width pair in
// a named tape category, or a machine signature (interfaces at a meta level).
struct TapePortSig {
    std::string category;
    Nat in = 1;
    Nat out = 1;
    friend bool operator==(const TapePortSig&, const TapePortSig&) = default;
};

struct MachinePortSig {
    Nat level = 1;  // admits machine values of meta level strictly below this
    std::shared_ptr<const MachineObject> dom;
    std::shared_ptr<const MachineObject> cod;
    friend bool operator==(const MachinePortSig& a, const MachinePortSig& b);
};

using PortSig = std::variant<TapePortSig, MachinePortSig>;

// A machine value of signature `actual` may be stored where `declared` is
// expected: tape signatures match exactly, machine signatures additionally
// admit lower meta levels.
bool sig_fits(const PortSig& actual, const PortSig& declared);

// StrMach object: a tuple of state spaces together with morphism signatures.
struct MachineObject {
    std::vector<StateSpace> state_spaces;
    std::vector<PortSig> morphism_sigs;

    friend bool operator==(const MachineObject& a, const MachineObject& b);
};

std::string to_string(const PortSig& sig);
std::string to_string(const MachineObject& obj);

}  // namespace strmach
