"""Setup script: create data directories and check the bundled presets."""

import shutil
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

BASE_DIR = Path(__file__).parent.parent.parent


def setup_directories():
    """Create the log and result directories."""
    for directory in (BASE_DIR / "data" / "logs", BASE_DIR / "data" / "results"):
        directory.mkdir(parents=True, exist_ok=True)
        print(f"Created directory: {directory}")


def setup_env_file():
    """Create .env file from example if not exists."""
    env_file = BASE_DIR / ".env"
    env_example = BASE_DIR / ".env.example"

    if not env_file.exists() and env_example.exists():
        shutil.copy(env_example, env_file)
        print("Created .env file from .env.example")
    elif env_file.exists():
        print(".env file already exists")
    else:
        print("Warning: .env.example not found")


def check_presets() -> int:
    """Validate every preset; returns the number of broken ones."""
    from config.settings import settings
    from src.services.experiment import load_experiment_config
    from src.utils.exceptions import ConfigurationError

    broken = 0
    for path in sorted(settings.presets_dir.glob("*.json")) + sorted(settings.presets_dir.glob("*.yaml")):
        try:
            cfg = load_experiment_config(path)
            print(f"  {path.name}: {cfg.trials} trials, {cfg.system.num_bs} BSs")
        except ConfigurationError as e:
            broken += 1
            print(f"  {path.name}: INVALID ({e.message})")
    return broken


def main():
    """Run setup."""
    print("=" * 50)
    print("vcell-sim setup")
    print("=" * 50)

    print("\n1. Creating directories...")
    setup_directories()

    print("\n2. Setting up environment file...")
    setup_env_file()

    print("\n3. Checking presets...")
    try:
        broken = check_presets()
    except ImportError as e:
        print(f"Preset check failed: {e}")
        print("You may need to install dependencies first: pip install -r requirements/base.txt")
        return 1

    print("\n" + "=" * 50)
    print("Setup complete!" if not broken else f"Setup finished with {broken} invalid preset(s)")
    print("=" * 50)
    print("\nNext steps:")
    print("1. ./run.sh validate config/presets/desk.json")
    print("2. ./run.sh run config/presets/desk.json")
    return 1 if broken else 0


if __name__ == "__main__":
    sys.exit(main())
