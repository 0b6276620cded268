from flask import Flask, request
