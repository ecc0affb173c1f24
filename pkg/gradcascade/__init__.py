from .cascade import CascadeConfig, CascadeRecord, run_cascade
from .graph import DiffusionGraph, generate
from .mlp import MlpModel, XorDataset, train_run
from .campaign import Campaign, CampaignConfig
