from pathlib import Path

from django.conf import settings
from django.core.management.base import CommandError

from apps.clustering.centroids import save_centroids
from apps.clustering.kmeans import ClusterParams, cluster
from apps.core.commands import ToolkitCommand, comma_list
from apps.corpus.dataset import load_dataset


class Command(ToolkitCommand):
    help = "Cluster a dataset's binary vectors with K-Means and write one centroids file per k."
    subcommand = "cluster"

    def add_toolkit_arguments(self, parser):
        self.option(parser, "--dataset", type=Path, help="Dataset file written by extract.")
        self.option(
            parser,
            "--k",
            type=comma_list(int),
            help="Number of clusters, or a comma separated list such as 1,2,4,8,16.",
        )
        self.option(parser, "--seed", type=int, seed=True, help="64-bit seed; drawn from entropy when absent.")
        self.option(parser, "--n-init", type=int, default=lambda: settings.FEATUREFUZZ["N_INIT"])
        self.option(parser, "--max-iter", type=int, default=lambda: settings.FEATUREFUZZ["MAX_ITER"])
        self.option(parser, "--tolerance", type=float, default=lambda: settings.FEATUREFUZZ["TOLERANCE"])
        self.option(
            parser,
            "--out",
            type=str,
            help="Centroids file; must contain {k} when several k are given.",
        )

    def run(self, params):
        self.require(params, "dataset", "k", "out")
        ks: list[int] = params["k"]
        template: str = params["out"]
        if len(ks) > 1 and "{k}" not in template:
            raise CommandError("--out must contain {k} when --k lists several values")

        dataset = load_dataset(params["dataset"])
        outputs = []
        for k in ks:
            cluster_params = ClusterParams(
                k=k,
                seed=params["seed"],
                n_init=params["n_init"],
                max_iter=params["max_iter"],
                tolerance=params["tolerance"],
            )
            result = cluster(dataset, cluster_params)
            out = save_centroids(result, Path(template.replace("{k}", str(k))))
            sizes = ", ".join(str(size) for size in result.cluster_sizes)
            self.stdout.write(f"k={k}: inertia {result.inertia:.4f}, sizes [{sizes}] -> {out}")
            outputs.append(out)
        return outputs
