//! A small "C Programming Language" knowledge map centred on the
//! array/pointer comparison question, plus a matching learner trace.
//!
//! Shape: `Array` has six attribute units and `Pointer` five; the two are
//! linked through `Array Pointer` and `Pointer Array`, whose own
//! neighbourhoods complete a five-unit connective region.

use crate::km::{KnowledgeMap, KnowledgeUnit, RelationKind, SemanticEdge, UnitId};

const UNITS: &[(&str, &str, &str)] = &[
    ("array", "Array", "A group of variables of one type in a contiguous region of memory."),
    ("pointer", "Pointer", "A variable holding the address of another object."),
    ("array-definition", "Array Definition", "Syntax for declaring an array."),
    ("array-type", "Array Type", "The element type and length of an array."),
    ("2d-array", "2D Array", "An array whose elements are arrays."),
    ("array-element", "Array Element", ""),
    ("array-index", "Array Index", "Zero-based subscripts."),
    ("array-initialization", "Array Initialization", ""),
    ("2d-array-initialization", "2D Array Initialization", "Nested brace initializers."),
    ("character-array", "Character Array", ""),
    ("string", "String", "A NUL-terminated character array."),
    ("array-pointer", "Array Pointer", "A pointer to a whole array."),
    ("pointer-array", "Pointer Array", "An array whose elements are pointers."),
    ("array-pointer-structure", "Array Pointer Structure", ""),
    ("array-pointer-definition", "Array Pointer Definition", ""),
    ("pointer-array-definition", "Pointer Array Definition", ""),
    ("pointer-definition", "Pointer Definition", ""),
    ("pointer-type", "Pointer Type", ""),
    ("pointer-arithmetic", "Pointer Arithmetic", "Adding integers to pointers scales by element size."),
    ("pointer-variable", "Pointer Variable", ""),
    ("null-pointer", "Null Pointer", ""),
    ("memory-address", "Memory Address", ""),
    ("function", "Function", ""),
    ("body", "Body", ""),
    ("parameter", "Parameter", ""),
];

const EDGES: &[(&str, RelationKind, &str)] = &[
    ("array", RelationKind::Attribute, "array-definition"),
    ("array", RelationKind::Attribute, "array-type"),
    ("array", RelationKind::Attribute, "2d-array"),
    ("array", RelationKind::Attribute, "array-element"),
    ("array", RelationKind::Attribute, "array-index"),
    ("array", RelationKind::Attribute, "array-initialization"),
    ("2d-array-initialization", RelationKind::PartOf, "2d-array"),
    ("character-array", RelationKind::KindOf, "array"),
    ("string", RelationKind::KindOf, "character-array"),
    ("array", RelationKind::Association, "array-pointer"),
    ("array-pointer", RelationKind::KindOf, "pointer"),
    ("pointer-array", RelationKind::KindOf, "array"),
    ("pointer", RelationKind::Association, "pointer-array"),
    ("array-pointer", RelationKind::Attribute, "array-pointer-structure"),
    ("array-pointer", RelationKind::Attribute, "array-pointer-definition"),
    ("pointer-array", RelationKind::Attribute, "pointer-array-definition"),
    ("pointer", RelationKind::Attribute, "pointer-definition"),
    ("pointer", RelationKind::Attribute, "pointer-type"),
    ("pointer", RelationKind::Attribute, "pointer-arithmetic"),
    ("pointer", RelationKind::Attribute, "pointer-variable"),
    ("pointer", RelationKind::Attribute, "null-pointer"),
    ("pointer", RelationKind::Association, "memory-address"),
    ("body", RelationKind::PartOf, "function"),
    ("parameter", RelationKind::PartOf, "function"),
];

pub fn c_course_map() -> KnowledgeMap {
    KnowledgeMap::new(
        "c-programming",
        UNITS.iter().map(|(id, name, content)| KnowledgeUnit {
            id: UnitId::new(*id),
            name: name.to_string(),
            content: content.to_string(),
            core_term: name.to_lowercase(),
        }),
        EDGES.iter().map(|(h, r, t)| SemanticEdge::new(*h, *r, *t)),
    )
    .expect("fixture map is valid")
}

/// A learner trace that touches half of the array description and three
/// of the five connective units, with one subnode visit in between.
pub fn comparison_trace() -> Vec<UnitId> {
    [
        "array-definition",
        "array-type",
        "2d-array",
        "2d-array-initialization",
        "array-pointer",
        "array-pointer-structure",
        "pointer-array",
    ]
    .into_iter()
    .map(UnitId::new)
    .collect()
}
