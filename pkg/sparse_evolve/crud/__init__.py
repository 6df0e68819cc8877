from sparse_evolve.crud.experiment_run import experiment_run
