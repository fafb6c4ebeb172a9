from rich.progress import Progress, BarColumn, TextColumn, TimeElapsedColumn
from rich.console import Console
from typing import Dict, Any, Optional
import threading


class ProgressTracker:
    """Barres de progression Rich (dépôts, versions), désactivables."""

    def __init__(self, enabled: bool = True):
        self.console = Console(stderr=True)
        self.progress = Progress(
            TextColumn("[bold blue]{task.description}"),
            BarColumn(),
            TextColumn("({task.completed:,}/{task.total:,})"),
            TimeElapsedColumn(),
            console=self.console,
            disable=not enabled,
        )
        self.tasks: Dict[str, Any] = {}
        self._lock = threading.Lock()

    def add_task(self, name: str, description: str, total: int):
        with self._lock:
            task_id = self.progress.add_task(description, total=total)
            self.tasks[name] = task_id
        return task_id

    def update(self, name: str, advance: int = 1, completed: Optional[int] = None, **kwargs):
        with self._lock:
            if name not in self.tasks:
                return
            if completed is not None:
                self.progress.update(self.tasks[name], completed=completed, **kwargs)
            else:
                self.progress.update(self.tasks[name], advance=advance, **kwargs)

    def reset(self, name: str, description: str, total: int):
        """Réinitialise une tâche (nouveau dépôt dans la tâche des versions)."""
        with self._lock:
            if name in self.tasks:
                self.progress.reset(self.tasks[name], total=total, description=description)

    def start(self):
        self.progress.start()

    def stop(self):
        self.progress.stop()

    def __enter__(self):
        self.start()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop()
