"""Runtime configuration and environment variable handling."""
import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

class RuntimeConfig:
    """Configuration for where and how the pipeline runs."""
    
    def __init__(self):
        """Initialize configuration from environment variables."""
        self.device = os.getenv('RETARGET_DEVICE', 'cpu')
        self.output_dir = Path(os.getenv('RETARGET_OUTPUT_DIR', 'output'))
        self.num_threads = int(os.getenv('RETARGET_NUM_THREADS', '1'))
        
        # Deterministic kernels are required for reproducible loss trajectories
        self.deterministic = os.getenv('RETARGET_DETERMINISTIC', 'true').lower() == 'true'
        
        self._validate_config()
        
    def _validate_config(self) -> None:
        """Reject settings the trainer cannot honour."""
        if self.num_threads < 1:
            raise ValueError(
                f"RETARGET_NUM_THREADS must be >= 1, got {self.num_threads}"
            )
        
    def get_output_path(self, *parts: str) -> Path:
        """Get a path under the output directory, creating parents."""
        path = self.output_dir.joinpath(*parts)
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

# Create a singleton instance
runtime_config = RuntimeConfig()
