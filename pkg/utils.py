# ══════════════════════════════════════════════════════════════
# utils.py — UTILIDADES
# ══════════════════════════════════════════════════════════════

import csv
import logging
from typing import List, Dict, Optional, Any, Tuple, Sequence
from pathlib import Path


# ──────────────────────────────────────────────────────────────
# GESTOR DE ARCHIVOS
# ──────────────────────────────────────────────────────────────

class GestorArchivos:
    """
    Gestor de archivos para artefactos CSV y volcados de texto
    """

    @staticmethod
    def anexar_csv(filas: Sequence[Dict[str, Any]], ruta: str,
                   columnas: Sequence[str]) -> None:
        """Anexar filas a un CSV, escribiendo la cabecera si el archivo es nuevo"""
        destino = Path(ruta)
        if destino.parent != Path(""):
            GestorArchivos.crear_directorio(str(destino.parent))
        nuevo = not destino.exists() or destino.stat().st_size == 0
        with open(destino, "a", encoding="utf-8", newline="") as f:
            escritor = csv.DictWriter(f, fieldnames=list(columnas))
            if nuevo:
                escritor.writeheader()
            for fila in filas:
                escritor.writerow({k: fila.get(k, "") for k in columnas})

    @staticmethod
    def leer_csv(ruta: str) -> List[Dict[str, str]]:
        """Leer un CSV como lista de diccionarios"""
        with open(ruta, "r", encoding="utf-8", newline="") as f:
            return list(csv.DictReader(f))

    @staticmethod
    def guardar_texto(texto: str, ruta: str) -> None:
        """Guardar texto plano"""
        with open(ruta, "w", encoding="utf-8") as f:
            f.write(texto)

    @staticmethod
    def crear_directorio(ruta: str) -> None:
        """Crear directorio si no existe"""
        Path(ruta).mkdir(parents=True, exist_ok=True)


# ──────────────────────────────────────────────────────────────
# LOGGER
# ──────────────────────────────────────────────────────────────

class Logger:
    """
    Logger del sistema sobre `logging`, bajo el espacio de nombres `cotas`
    """

    def __init__(self, nombre: str = "cotas"):
        self.nombre = nombre
        self._logger = logging.getLogger(f"cotas.{nombre}")

    def debug(self, mensaje: str) -> None:
        self._logger.debug(mensaje)

    def info(self, mensaje: str) -> None:
        self._logger.info(mensaje)

    def warning(self, mensaje: str) -> None:
        self._logger.warning(mensaje)

    def error(self, mensaje: str) -> None:
        self._logger.error(mensaje)


def configurar_logging(debug: bool = False) -> None:
    """Configurar el handler raíz de la CLI"""
    logging.basicConfig(
        level=logging.DEBUG if debug else logging.INFO,
        format="[%(levelname)s] %(name)s: %(message)s",
    )


# ──────────────────────────────────────────────────────────────
# VALIDADORES
# ──────────────────────────────────────────────────────────────

class Validadores:
    """
    Funciones de validación de parámetros
    """

    @staticmethod
    def validar_positivo(nombre: str, valor: Optional[float]) -> Tuple[bool, str]:
        if valor is None:
            return False, f"{nombre} es obligatorio"
        if not valor > 0:
            return False, f"{nombre} debe ser positivo (recibido {valor})"
        return True, "OK"

    @staticmethod
    def validar_entero(nombre: str, valor: Any, minimo: int) -> Tuple[bool, str]:
        if isinstance(valor, bool) or not isinstance(valor, int):
            return False, f"{nombre} debe ser entero (recibido {valor!r})"
        if valor < minimo:
            return False, f"{nombre} debe ser ≥ {minimo} (recibido {valor})"
        return True, "OK"
