//! Exact integer linear algebra: matrices, Smith forms, lattices and
//! finitely generated abelian groups.

mod group;
mod lattice;
mod matrix;
mod reducer;
mod smith;
mod sparse;

pub use group::{
    canon_image, canon_kernel, cokernel, cokernel_dense, hom_kernel, hom_kernel_from, in_span, is_zero_in, module_closure,
    normalize_invariants, reduce_mod, ser_int, ser_opt_int, submodule_and_quotient, subquotient, AbMap, CanonMap, Canonical, FinAbGroup,
    Presentation, Subgroup,
};
pub use lattice::{gcd_all, is_primitive_basis, kernel_lattice, left_kernel_rows, RowLattice};
pub use matrix::{parse_triple_block, Int, IntMatrix};
pub use reducer::{Coef, ColumnReduction, InputColumn};
pub use smith::{smith_normal_form, SmithForm};
pub use sparse::{pre_reduce, PreReduced, SparseRow};
