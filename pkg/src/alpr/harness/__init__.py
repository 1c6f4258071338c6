from .experiment import ExperimentReport, ExperimentSpec, grid_search, run_experiment, select_baseline_lambda
from .io import export_trace, load_csv, load_model, load_trace, save_csv, save_model, write_report

__all__ = ["ExperimentReport", "ExperimentSpec", "grid_search", "run_experiment", "select_baseline_lambda",
           "export_trace", "load_csv", "load_model", "load_trace", "save_csv", "save_model", "write_report"]
