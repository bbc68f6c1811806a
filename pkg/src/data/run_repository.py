import os
import sqlite3
import datetime
import json
from typing import Optional, List, Dict, Any
from contextlib import contextmanager
from src.config import RunConfig
from src.config.constants import TABLE_EQUILIBRIUM_RUNS


class RunRepository:
    def __init__(self, db_path: str = None):
        if db_path is None:
            db_path = RunConfig.runs_db_path()
        self.db_path = db_path
        self._ensure_db_exists()

    def _ensure_db_exists(self):
        directory = os.path.dirname(self.db_path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with self._get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(f'''
                CREATE TABLE IF NOT EXISTS {TABLE_EQUILIBRIUM_RUNS} (
                    id INTEGER PRIMARY KEY AUTOINCREMENT,
                    scenario TEXT NOT NULL,
                    scenario_path TEXT NOT NULL,
                    output_dir TEXT NOT NULL,
                    seed INTEGER NOT NULL,
                    exploitability REAL,
                    converged INTEGER NOT NULL,
                    iterations INTEGER,
                    energy_passed INTEGER,
                    holder_passed INTEGER,
                    exit_code INTEGER NOT NULL,
                    parameters_json TEXT NOT NULL,
                    created_at TEXT NOT NULL
                )
            ''')
            cursor.execute(f'''
                CREATE INDEX IF NOT EXISTS idx_scenario ON {TABLE_EQUILIBRIUM_RUNS}(scenario)
            ''')
            cursor.execute(f'''
                CREATE INDEX IF NOT EXISTS idx_created_at ON {TABLE_EQUILIBRIUM_RUNS}(created_at DESC)
            ''')
            conn.commit()

    @contextmanager
    def _get_connection(self):
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
        finally:
            conn.close()

    def save_run(self, run_record: Dict[str, Any]) -> int:
        with self._get_connection() as conn:
            cursor = conn.cursor()
            parameters_json = json.dumps(run_record.get('parameters', {}), sort_keys=True)
            created_at = datetime.datetime.now().isoformat()
            cursor.execute(f'''
                INSERT INTO {TABLE_EQUILIBRIUM_RUNS} (
                    scenario, scenario_path, output_dir, seed, exploitability, converged, iterations,
                    energy_passed, holder_passed, exit_code, parameters_json, created_at
                ) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            ''', (
                run_record['scenario'],
                run_record['scenario_path'],
                run_record['output_dir'],
                run_record['seed'],
                run_record.get('exploitability'),
                int(bool(run_record['converged'])),
                run_record.get('iterations'),
                _flag(run_record.get('energy_passed')),
                _flag(run_record.get('holder_passed')),
                run_record['exit_code'],
                parameters_json,
                created_at
            ))
            conn.commit()
            return cursor.lastrowid

    def get_run_by_id(self, run_id: int) -> Optional[Dict[str, Any]]:
        with self._get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(f'SELECT * FROM {TABLE_EQUILIBRIUM_RUNS} WHERE id = ?', (run_id,))
            row = cursor.fetchone()
            if row is None:
                return None
            return self._row_to_dict(row)

    def list_runs(self, scenario: Optional[str] = None, converged: Optional[bool] = None,
                  limit: int = 100, offset: int = 0) -> List[Dict[str, Any]]:
        with self._get_connection() as conn:
            cursor = conn.cursor()
            query = f'SELECT * FROM {TABLE_EQUILIBRIUM_RUNS} WHERE 1=1'
            params = []
            if scenario:
                query += ' AND scenario = ?'
                params.append(scenario)
            if converged is not None:
                query += ' AND converged = ?'
                params.append(int(converged))
            query += ' ORDER BY created_at DESC, id DESC LIMIT ? OFFSET ?'
            params.extend([limit, offset])
            cursor.execute(query, params)
            rows = cursor.fetchall()
            return [self._row_to_dict(row) for row in rows]

    def _row_to_dict(self, row: sqlite3.Row) -> Dict[str, Any]:
        result = dict(row)
        result['parameters'] = json.loads(result['parameters_json'])
        del result['parameters_json']
        result['converged'] = bool(result['converged'])
        return result

    def get_run_count(self, scenario: Optional[str] = None) -> int:
        with self._get_connection() as conn:
            cursor = conn.cursor()
            query = f'SELECT COUNT(*) FROM {TABLE_EQUILIBRIUM_RUNS} WHERE 1=1'
            params = []
            if scenario:
                query += ' AND scenario = ?'
                params.append(scenario)
            cursor.execute(query, params)
            return cursor.fetchone()[0]

    def delete_run(self, run_id: int) -> bool:
        with self._get_connection() as conn:
            cursor = conn.cursor()
            cursor.execute(f'DELETE FROM {TABLE_EQUILIBRIUM_RUNS} WHERE id = ?', (run_id,))
            conn.commit()
            return cursor.rowcount > 0


def _flag(value: Optional[bool]) -> Optional[int]:
    return None if value is None else int(bool(value))
