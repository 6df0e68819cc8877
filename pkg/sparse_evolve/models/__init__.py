from sparse_evolve.models.experiment_run import ExperimentRun
