#!/usr/bin/env python3
"""Desk-scale end-to-end run on the synthetic dataset.

Generates the 6 x 8 x 2 grid (plus held-out test identities), trains the reduced
model on CPU, then checks reconstruction progress, latent separability on the
held-out identities and the IDScore direction. Writes a JSON summary.
"""
import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Optional

from src.config.logging_config import setup_logging
from src.config.run_config import RunConfig
from src.config.runtime_config import runtime_config
from src.data_processing.skeleton.keypoint_loader import index_digest
from src.data_processing.skeleton.synthetic_generator import build_synthetic_dataset
from src.evaluation.embedding_analyzer import compute_embeddings, separability
from src.evaluation.idscore.idscore_analyzer import run_idscore_protocol, write_report
from src.training.trainer import fit, load_model

logger = logging.getLogger(__name__)

REC_RATIO_MAX = 0.2
NN_ACCURACY_MIN = 0.8
IDSCORE1_MIN = 0.3


def run(out_dir: Path, seed: int = 0, epochs: Optional[int] = None) -> dict:
    started = time.monotonic()
    config = RunConfig.desk_scale().with_seed(seed)
    dataset, new_subject = build_synthetic_dataset(config.dataset)

    logger.info(f"Training desk-scale model on {len(dataset.train())} clips...")
    checkpoint = fit(dataset, config, out_dir / 'train', max_epochs=epochs,
                     manifest_digest=index_digest(dataset))
    model = load_model(checkpoint)

    rec_first, rec_last = checkpoint.history[0]['rec'], checkpoint.history[-1]['rec']
    nn = separability(compute_embeddings(model, dataset.test()))

    logger.info("Running IDScore protocol...")
    report = run_idscore_protocol(model, dataset, new_subject[0], config.eval)
    write_report(report, out_dir / 'idscore.csv')

    checks = {
        'rec_ratio': rec_last / rec_first <= REC_RATIO_MAX,
        'id_1nn': nn['id_1nn'] >= NN_ACCURACY_MIN,
        'mc_1nn': nn['mc_1nn'] >= NN_ACCURACY_MIN,
        'idscore1': report.idscore1 >= IDSCORE1_MIN,
        'cross_below_rec': report.cross.rank1 < report.rec.rank1,
    }
    return {
        'epochs': checkpoint.epoch,
        'steps': checkpoint.step,
        'minutes': (time.monotonic() - started) / 60.0,
        'rec_first': rec_first,
        'rec_last': rec_last,
        'separability': nn,
        'idscore': report.to_row(),
        'checks': checks,
        'passed': all(checks.values()),
    }


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument('--out', default=str(runtime_config.output_dir / 'desk_acceptance'),
                        help='Output directory')
    parser.add_argument('--seed', type=int, default=0, help='Seed for data, training and evaluation')
    parser.add_argument('--epochs', type=int, help='Override the desk-scale epoch count')
    args = parser.parse_args()

    setup_logging('src')
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = run(out_dir, seed=args.seed, epochs=args.epochs)

    summary_path = out_dir / 'summary.json'
    summary_path.write_text(json.dumps(summary, indent=2))
    print(json.dumps(summary['checks'], indent=2))
    print(f"Summary written to {summary_path}")
    return 0 if summary['passed'] else 1


if __name__ == '__main__':
    sys.exit(main())
