"""Logging configuration for the application."""
import logging
import os
import sys
from datetime import datetime
from functools import wraps
from pathlib import Path
from typing import Any, Callable

from dotenv import load_dotenv

load_dotenv()

# Create logs directory if it doesn't exist
log_dir = Path(os.getenv('RETARGET_LOG_DIR', Path(__file__).parent.parent.parent / 'logs'))
log_dir.mkdir(parents=True, exist_ok=True)

def setup_logging(name: str) -> logging.Logger:
    """Set up logging with both file and console output."""
    logger = logging.getLogger(name)
    logger.setLevel(logging.DEBUG)
    
    # Prevent duplicate handlers
    if not logger.handlers:
        # Console handler with WARNING level (less verbose)
        console = logging.StreamHandler(sys.stdout)
        console.setLevel(logging.WARNING)
        console.setFormatter(logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s'
        ))
        
        # File handler with DEBUG level
        file_handler = logging.FileHandler(
            log_dir / 'retarget.log',
            encoding='utf-8'
        )
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        ))
        
        logger.addHandler(console)
        logger.addHandler(file_handler)
    
    return logger

def log_stage(stage: str) -> Callable:
    """Decorator logging start, duration and failure of a pipeline stage."""
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            logger = logging.getLogger('src.stages')
            start_time = datetime.now()
            logger.info(f"Stage {stage} - started")
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                duration = (datetime.now() - start_time).total_seconds()
                logger.error(f"Stage {stage} - Duration: {duration:.2f}s - Error: {str(e)}")
                raise
            duration = (datetime.now() - start_time).total_seconds()
            logger.info(f"Stage {stage} - Duration: {duration:.2f}s - Status: Success")
            return result
        return wrapper
    return decorator
