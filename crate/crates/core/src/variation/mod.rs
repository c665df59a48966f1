//! Variations of Gaussian volume and perimeter, stability quadratic forms and
//! the curvature conditions that classify minimizers.

pub mod fd;
pub mod forms;
pub mod formulas;
pub mod random;
pub mod report;

pub use fd::{fd_variation_check, varied_perimeter, FdReport, FdRow};
pub use forms::{
    dilation_balance, dilation_balance_closed_form, dilation_form, dilation_form_curvature, mean_curvature_shift, perturb_eigen, quadratic_form, DilationForm,
    PerturbReport, ShiftReport,
};
pub use formulas::{first_variation, second_variation_perimeter, second_variation_volume, FirstVariation, VariationInput};
pub use random::{curvature_triple_integral, mean_inner_product, random_bilinear, uniform_sphere, BilinearReport, BilinearTrial, McEstimate};
pub use report::{nodal_domains, theorem_report, ClosedForms, ConditionReport, Consequence, NodalReport, Status, Verdict, Witness};
