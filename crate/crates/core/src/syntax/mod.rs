//! Typed abstract syntax, well-formedness checking and the syntactic
//! variable analyses used by proof-rule side conditions.

mod ast;
mod typecheck;
mod vars;

pub use ast::*;
pub use typecheck::{typecheck, typecheck_formula, typecheck_runtime, Diagnostic, RuntimeChecker};
pub use vars::{analyze_vars, change_decls, change_stmt, free_vars, var_decls, var_expr, var_stmt, VarSets};
