#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace treelog {

// Extensional predicates of the tree signatures. label/not_label are
// indexed families over an open string alphabet; child_k is a family
// over k >= 1.
enum class Builtin {
    root,
    leaf,
    lastsibling,
    firstsibling,
    label,
    not_label,
    firstchild,
    nextsibling,
    child,
    lastchild,
    child_k,
};

inline int builtin_arity(Builtin b) {
    switch (b) {
        case Builtin::root:
        case Builtin::leaf:
        case Builtin::lastsibling:
        case Builtin::firstsibling:
        case Builtin::label:
        case Builtin::not_label:
            return 1;
        default:
            return 2;
    }
}

inline std::string_view builtin_name(Builtin b) {
    switch (b) {
        case Builtin::root: return "root";
        case Builtin::leaf: return "leaf";
        case Builtin::lastsibling: return "lastsibling";
        case Builtin::firstsibling: return "firstsibling";
        case Builtin::label: return "label";
        case Builtin::not_label: return "not_label";
        case Builtin::firstchild: return "firstchild";
        case Builtin::nextsibling: return "nextsibling";
        case Builtin::child: return "child";
        case Builtin::lastchild: return "lastchild";
        case Builtin::child_k: return "child_k";
    }
    return "";
}

}  // namespace treelog
